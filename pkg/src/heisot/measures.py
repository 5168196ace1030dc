"""Finitely supported measures on H^n.

A measure is stored as parallel arrays of atom coordinates and strictly positive
weights, kept in a canonical lexicographic order so that equal measures have equal
representations and serialization round-trips are byte-stable.  Atoms closer than
1e-12 in every coordinate are merged at construction time, which is far below any
tolerance used by the geometric operations.

Total mass is tracked with exactly rounded summation; measures of non-unit mass are
allowed (the transport solver only requires its two endpoints to carry equal mass),
while zero-mass measures appear only as sentinels inside signed decompositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatchError
from .geometry import HeisenbergPoint, VerticalLine

__all__ = [
    "DiscreteMeasure",
    "SignedDecomposition",
    "MERGE_TOL",
    "PROBABILITY_TOL",
    "make_measure",
    "empty_measure",
    "dirac",
    "push_forward",
    "p_cost_to_point",
    "horizontal_p_moment",
    "jordan_decomposition",
    "vertical_support_line",
    "scale_measure",
    "add_measures",
    "mix_measures",
    "subtract_measure",
    "measures_equal",
]

#: Coordinatewise tolerance below which two atoms are considered the same point.
MERGE_TOL = 1e-12

#: Tolerance on |total_mass - 1| for the probability flag.
PROBABILITY_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


def _merge_sorted(
    coords: np.ndarray, ws: np.ndarray, merge_tol: float, drop_tol: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Sort rows lexicographically and merge runs equal within merge_tol.

    Weights may be signed; merged groups whose net weight has magnitude at most
    drop_tol are dropped.  Group weights are summed with math.fsum so that totals
    do not depend on the merge pattern.
    """
    if coords.shape[0] == 0:
        return coords, ws
    order = np.lexsort(coords.T[::-1])
    rep_rows = []
    groups: list[list[float]] = []
    for idx in order:
        row = coords[idx]
        if rep_rows and np.max(np.abs(row - rep_rows[-1])) <= merge_tol:
            groups[-1].append(float(ws[idx]))
        else:
            rep_rows.append(row)
            groups.append([float(ws[idx])])
    merged_w = np.array([math.fsum(g) for g in groups])
    merged_c = np.array(rep_rows)
    keep = np.abs(merged_w) > drop_tol
    return merged_c[keep], merged_w[keep]


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A finitely supported nonnegative measure with atoms in canonical order."""

    xs: np.ndarray  # (N, n)
    ys: np.ndarray  # (N, n)
    zs: np.ndarray  # (N,)
    ws: np.ndarray  # (N,) strictly positive

    def __post_init__(self):
        object.__setattr__(self, "xs", _frozen(np.atleast_2d(self.xs)))
        object.__setattr__(self, "ys", _frozen(np.atleast_2d(self.ys)))
        object.__setattr__(self, "zs", _frozen(np.atleast_1d(self.zs)))
        object.__setattr__(self, "ws", _frozen(np.atleast_1d(self.ws)))
        n_atoms = self.ws.size
        if self.xs.shape != self.ys.shape or self.xs.shape[0] != n_atoms or self.zs.size != n_atoms:
            raise ValueError("inconsistent atom array shapes")
        if n_atoms and not (
            np.all(np.isfinite(self.xs))
            and np.all(np.isfinite(self.ys))
            and np.all(np.isfinite(self.zs))
            and np.all(np.isfinite(self.ws))
        ):
            raise ValueError("atoms contain non-finite entries")

    @property
    def dim(self) -> int:
        return self.xs.shape[1]

    @property
    def num_atoms(self) -> int:
        return self.ws.size

    def total_mass(self) -> float:
        return float(math.fsum(self.ws.tolist()))

    @property
    def is_probability(self) -> bool:
        return abs(self.total_mass() - 1.0) <= PROBABILITY_TOL

    def point(self, i: int) -> HeisenbergPoint:
        return HeisenbergPoint(self.xs[i], self.ys[i], float(self.zs[i]))

    def atoms(self) -> Iterator[Tuple[HeisenbergPoint, float]]:
        for i in range(self.num_atoms):
            yield self.point(i), float(self.ws[i])

    def coords(self) -> np.ndarray:
        """Atom coordinates as an (N, 2n+1) array."""
        return np.hstack([self.xs, self.ys, self.zs[:, None]])

    def planes(self) -> np.ndarray:
        """Horizontal atom coordinates as an (N, 2n) array."""
        return np.hstack([self.xs, self.ys])

    def __repr__(self):
        return (
            f"DiscreteMeasure(dim={self.dim}, atoms={self.num_atoms}, "
            f"mass={self.total_mass():.12g})"
        )


def _measure_from_rows(coords: np.ndarray, ws: np.ndarray, dim: int) -> DiscreteMeasure:
    if coords.shape[0] == 0:
        return empty_measure(dim)
    return DiscreteMeasure(
        coords[:, :dim], coords[:, dim : 2 * dim], coords[:, 2 * dim], ws
    )


def _build(
    coords: np.ndarray, ws: np.ndarray, dim: int, drop_tol: float = 0.0
) -> DiscreteMeasure:
    merged_c, merged_w = _merge_sorted(coords, ws, MERGE_TOL, drop_tol)
    if merged_c.shape[0] and np.any(merged_w <= 0.0):
        raise ValueError("weights must be strictly positive after merging")
    return _measure_from_rows(merged_c, merged_w, dim)


def make_measure(
    atoms: Iterable[Tuple[HeisenbergPoint, float]]
) -> DiscreteMeasure:
    """Build a measure from (point, weight) pairs.

    Duplicate points (equal within 1e-12 coordinatewise) are merged; the atom order
    is canonical, so any two constructions of the same measure coincide.
    """
    pairs = list(atoms)
    if not pairs:
        raise ValueError("a measure needs at least one atom")
    dim = pairs[0][0].dim
    rows = []
    weights = []
    for pt, w in pairs:
        if not isinstance(pt, HeisenbergPoint):
            raise TypeError(f"expected HeisenbergPoint, got {type(pt).__name__}")
        if pt.dim != dim:
            raise DimensionMismatchError(
                f"atom dimension {pt.dim} differs from first atom dimension {dim}"
            )
        w = float(w)
        if not np.isfinite(w) or w <= 0.0:
            raise ValueError(f"atom weights must be positive and finite, got {w}")
        rows.append(pt.coords())
        weights.append(w)
    return _build(np.array(rows), np.array(weights), dim)


def empty_measure(dim: int) -> DiscreteMeasure:
    """The zero measure; valid only as a sentinel inside decompositions."""
    return DiscreteMeasure(
        np.zeros((0, dim)), np.zeros((0, dim)), np.zeros(0), np.zeros(0)
    )


def dirac(pt: HeisenbergPoint, w: float = 1.0) -> DiscreteMeasure:
    return make_measure([(pt, w)])


def _require_atoms(mu: DiscreteMeasure, op: str) -> None:
    if mu.num_atoms == 0:
        raise ValueError(f"{op} is undefined for the zero measure")


def _require_probability(mu: DiscreteMeasure, op: str) -> None:
    _require_atoms(mu, op)
    if not mu.is_probability:
        raise ValueError(f"{op} requires a probability measure, mass={mu.total_mass()!r}")


def push_forward(
    mu: DiscreteMeasure, f: Callable[[HeisenbergPoint], HeisenbergPoint]
) -> DiscreteMeasure:
    """The image measure under a pointwise map; colliding images are merged."""
    _require_atoms(mu, "push_forward")
    rows = []
    for pt, _ in mu.atoms():
        image = f(pt)
        if not isinstance(image, HeisenbergPoint):
            raise ValueError(f"map returned {type(image).__name__}, not a point")
        rows.append(image.coords())
    return _build(np.array(rows), np.array(mu.ws), mu.dim)


def p_cost_to_point(mu: DiscreteMeasure, qhat: HeisenbergPoint, p: float) -> float:
    """The p-th moment sum_i w_i d(q_i, qhat)^p."""
    _require_probability(mu, "p_cost_to_point")
    if mu.dim != qhat.dim:
        raise DimensionMismatchError(f"dimension mismatch: {mu.dim} vs {qhat.dim}")
    p = float(p)
    if p < 1.0:
        raise ValueError(f"p must be at least 1, got {p}")
    dists = _distances_to_point(mu, qhat)
    return float(np.sum(mu.ws * dists**p))


def _distances_to_point(mu: DiscreteMeasure, qhat: HeisenbergPoint) -> np.ndarray:
    dx = qhat.x[None, :] - mu.xs
    dy = qhat.y[None, :] - mu.ys
    dz = qhat.z - mu.zs + 2.0 * (mu.xs @ qhat.y - mu.ys @ qhat.x)
    plane_sq = np.einsum("ij,ij->i", dx, dx) + np.einsum("ij,ij->i", dy, dy)
    return (plane_sq**2 + dz**2) ** 0.25


def horizontal_p_moment(mu: DiscreteMeasure, p: float) -> float:
    """The horizontal moment sum_i w_i ||(x_i, y_i)||^p with the Euclidean norm."""
    _require_probability(mu, "horizontal_p_moment")
    p = float(p)
    if p < 1.0:
        raise ValueError(f"p must be at least 1, got {p}")
    plane_sq = np.einsum("ij,ij->i", mu.xs, mu.xs) + np.einsum("ij,ij->i", mu.ys, mu.ys)
    return float(np.sum(mu.ws * plane_sq ** (p / 2.0)))


@dataclass(frozen=True, eq=False)
class SignedDecomposition:
    """Positive and negative parts of a difference of measures (disjoint supports)."""

    positive_part: DiscreteMeasure
    negative_part: DiscreteMeasure


def jordan_decomposition(mu: DiscreteMeasure, nu: DiscreteMeasure) -> SignedDecomposition:
    """Split mu - nu into its positive and negative parts.

    Atoms shared by the two measures cancel; net weights with magnitude below
    1e-14 * (mass(mu) + mass(nu)) are treated as exact cancellations.  Either part
    may be the zero sentinel (when mu = nu both are).
    """
    if mu.dim != nu.dim:
        raise DimensionMismatchError(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    coords = np.vstack([mu.coords(), nu.coords()])
    signed = np.concatenate([mu.ws, -nu.ws])
    drop = 1e-14 * (mu.total_mass() + nu.total_mass())
    merged_c, merged_w = _merge_sorted(coords, signed, MERGE_TOL, drop)
    pos = merged_w > 0.0
    positive = _measure_from_rows(merged_c[pos], merged_w[pos], mu.dim)
    negative = _measure_from_rows(merged_c[~pos], -merged_w[~pos], mu.dim)
    return SignedDecomposition(positive, negative)


def vertical_support_line(mu: DiscreteMeasure) -> Optional[VerticalLine]:
    """The vertical line containing the support, if there is one.

    Present exactly when all atoms share their (x, y) coordinates within 1e-12.
    """
    if mu.num_atoms == 0:
        return None
    planes = mu.planes()
    if np.max(np.abs(planes - planes[0]), initial=0.0) <= MERGE_TOL:
        return VerticalLine(mu.xs[0], mu.ys[0])
    return None


def scale_measure(mu: DiscreteMeasure, c: float) -> DiscreteMeasure:
    """The measure c * mu for c >= 0; c = 0 yields the zero sentinel."""
    c = float(c)
    if c < 0.0 or not np.isfinite(c):
        raise ValueError(f"scale factor must be nonnegative and finite, got {c}")
    if c == 0.0 or mu.num_atoms == 0:
        return empty_measure(mu.dim)
    return DiscreteMeasure(mu.xs, mu.ys, mu.zs, c * mu.ws)


def add_measures(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """The sum mu + nu with shared atoms merged."""
    if mu.dim != nu.dim:
        raise DimensionMismatchError(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    if mu.num_atoms == 0:
        return nu
    if nu.num_atoms == 0:
        return mu
    coords = np.vstack([mu.coords(), nu.coords()])
    ws = np.concatenate([mu.ws, nu.ws])
    return _build(coords, ws, mu.dim)


def mix_measures(mu: DiscreteMeasure, nu: DiscreteMeasure, lam: float) -> DiscreteMeasure:
    """The convex combination (1 - lam) * mu + lam * nu for lam in [0, 1]."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixture weight must lie in [0, 1], got {lam}")
    if lam == 0.0:
        return mu
    if lam == 1.0:
        return nu
    return add_measures(scale_measure(mu, 1.0 - lam), scale_measure(nu, lam))


def subtract_measure(mu: DiscreteMeasure, part: DiscreteMeasure) -> DiscreteMeasure:
    """The difference mu - part when part is dominated by mu atomwise."""
    if mu.dim != part.dim:
        raise DimensionMismatchError(f"dimension mismatch: {mu.dim} vs {part.dim}")
    if part.num_atoms == 0:
        return mu
    coords = np.vstack([mu.coords(), part.coords()])
    signed = np.concatenate([mu.ws, -part.ws])
    drop = 1e-14 * (mu.total_mass() + part.total_mass())
    merged_c, merged_w = _merge_sorted(coords, signed, MERGE_TOL, drop)
    if np.any(merged_w < 0.0):
        raise ValueError("subtracted part is not dominated by the measure")
    keep = merged_w > 0.0
    return _measure_from_rows(merged_c[keep], merged_w[keep], mu.dim)


def measures_equal(
    mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = 0.0
) -> bool:
    """Whether two measures agree atom by atom (in canonical order) within tol."""
    if mu.dim != nu.dim or mu.num_atoms != nu.num_atoms:
        return False
    if mu.num_atoms == 0:
        return True
    return bool(
        np.max(np.abs(mu.coords() - nu.coords())) <= tol
        and np.max(np.abs(mu.ws - nu.ws)) <= tol
    )

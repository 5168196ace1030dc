"""Lift Euclidean transport maps on R^{2n} to Heisenberg transport maps.

A plane map T = (T1, T2) acting on horizontal coordinates lifts to

    (x, y, z)  ->  (T1(x, y), T2(x, y), z + 2(y . T1(x, y) - x . T2(x, y))),

which displaces every point horizontally: the z-component of q^{-1} * lift(q)
vanishes, so the Heisenberg cost of the lifted map equals the Euclidean cost of
T atom by atom.  Whenever T is optimal between the projected measure and its
image, the lifted map is optimal upstairs; ``certify_lift`` measures both
optimality gaps with the exact LP.

Plane maps may be closed-form (translations, dilations), arbitrary callables, or
finite lookup tables, e.g. extracted from a vertex of the plane transport LP when
that vertex assigns each source atom to a single target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NotInducedByMapError
from .geometry import HeisenbergPoint
from .measures import DiscreteMeasure, make_measure
from .transport import (
    Coupling,
    MapOptimalityReport,
    solve_wp,
    verify_map_optimality,
)

__all__ = [
    "PlaneMap",
    "plane_translation",
    "plane_dilation",
    "plane_map_from_pairs",
    "plane_map_from_coupling",
    "plane_projection_measure",
    "push_forward_plane",
    "lift_map",
    "certify_lift",
    "LiftReport",
]


@dataclass(frozen=True, eq=False)
class PlaneMap:
    """A map (x, y) -> (T1, T2) on R^{2n}, evaluated pointwise."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        out = np.asarray(self.evaluator(xy), dtype=float)
        if out.shape != xy.shape:
            raise ValueError(
                f"plane map returned shape {out.shape}, expected {xy.shape}"
            )
        if not np.all(np.isfinite(out)):
            raise ValueError("plane map produced non-finite coordinates")
        return out


def plane_translation(u, v) -> PlaneMap:
    """Translation (x, y) -> (x + u, y + v)."""
    shift = np.concatenate([np.atleast_1d(np.asarray(u, dtype=float)),
                            np.atleast_1d(np.asarray(v, dtype=float))])
    return PlaneMap(lambda xy: xy + shift, label="translation")


def plane_dilation(lam: float) -> PlaneMap:
    """Dilation (x, y) -> (lam x, lam y) for lam >= 0."""
    lam = float(lam)
    if lam < 0.0:
        raise ValueError(f"dilation factor must be nonnegative, got {lam}")
    return PlaneMap(lambda xy: lam * xy, label="dilation")


def plane_map_from_pairs(
    pairs: Sequence[tuple[np.ndarray, np.ndarray]], tol: float = 1e-9
) -> PlaneMap:
    """A lookup-table map defined only on the listed source points."""
    table = [(np.asarray(src, dtype=float), np.asarray(dst, dtype=float)) for src, dst in pairs]
    if not table:
        raise ValueError("lookup map needs at least one pair")

    def evaluate(xy: np.ndarray) -> np.ndarray:
        for src, dst in table:
            if src.shape == xy.shape and np.max(np.abs(src - xy)) <= tol:
                return dst
        raise ValueError(f"lookup map is undefined at {xy.tolist()}")

    return PlaneMap(evaluate, label="lookup")


def plane_map_from_coupling(coupling: Coupling, mass_tol: float = 1e-12) -> PlaneMap:
    """Read a transport map off a plan in which no source atom splits.

    Raises NotInducedByMapError when some row of the plan has more than one
    positive entry, i.e. the vertex is not permutation-like.
    """
    mass = coupling.mass
    pairs = []
    sources = coupling.source.planes()
    targets = coupling.target.planes()
    for i in range(mass.shape[0]):
        hits = np.nonzero(mass[i] > mass_tol)[0]
        if hits.size != 1:
            raise NotInducedByMapError(
                f"coupling is not induced by a map: source atom {i} splits into "
                f"{hits.size} targets"
            )
        pairs.append((sources[i], targets[hits[0]]))
    return plane_map_from_pairs(pairs)


def plane_projection_measure(mu: DiscreteMeasure) -> DiscreteMeasure:
    """The horizontal projection of mu, embedded in H^n at z = 0.

    Atoms sharing (x, y) collapse together; the result is meant for the solver's
    euclidean_plane cost, which ignores the z slot.
    """
    return make_measure(
        (HeisenbergPoint(mu.xs[i], mu.ys[i], 0.0), float(mu.ws[i]))
        for i in range(mu.num_atoms)
    )


def push_forward_plane(mu_plane: DiscreteMeasure, T: PlaneMap) -> DiscreteMeasure:
    """Image of a plane measure (z = 0 embedding) under a plane map."""
    n = mu_plane.dim
    atoms = []
    for i in range(mu_plane.num_atoms):
        image = T(mu_plane.planes()[i])
        atoms.append((HeisenbergPoint(image[:n], image[n:], 0.0), float(mu_plane.ws[i])))
    return make_measure(atoms)


def lift_map(T: PlaneMap) -> Callable[[HeisenbergPoint], HeisenbergPoint]:
    """The lifted map (T1, T2, z + 2(y . T1 - x . T2)) evaluated pointwise."""

    def lifted(q: HeisenbergPoint) -> HeisenbergPoint:
        image = T(q.plane())
        t1, t2 = image[: q.dim], image[q.dim :]
        z = q.z + 2.0 * (float(np.dot(q.y, t1)) - float(np.dot(q.x, t2)))
        return HeisenbergPoint(t1, t2, z)

    return lifted


@dataclass(frozen=True, eq=False)
class LiftReport:
    """Optimality gaps of a plane map and of its lift, on matching instances."""

    plane_map_cost: float
    plane_lp_cost: float
    plane_gap: float
    lifted: MapOptimalityReport

    @property
    def lifted_gap(self) -> float:
        return self.lifted.gap


def certify_lift(nu: DiscreteMeasure, T: PlaneMap, p: float) -> LiftReport:
    """Measure the plane and lifted optimality gaps for one base measure.

    The plane gap compares T against the LP between the projected measure and its
    T-image (Euclidean cost on R^{2n}); the lifted gap compares the lifted map
    against the Heisenberg LP.  A plane gap near zero certifies the lifted map as
    optimal, which shows up as a near-zero lifted gap.
    """
    if not nu.is_probability:
        raise ValueError("certify_lift requires a probability measure")
    p = float(p)
    mu_plane = plane_projection_measure(nu)
    target_plane = push_forward_plane(mu_plane, T)
    plane_lp = solve_wp(mu_plane, target_plane, p, cost="euclidean_plane")
    plane_cost = 0.0
    for i in range(mu_plane.num_atoms):
        src = mu_plane.planes()[i]
        plane_cost += float(mu_plane.ws[i]) * float(np.linalg.norm(T(src) - src)) ** p
    lifted = verify_map_optimality(nu, lift_map(T), p)
    return LiftReport(
        plane_map_cost=float(plane_cost),
        plane_lp_cost=plane_lp.cost_p,
        plane_gap=float(plane_cost - plane_lp.cost_p),
        lifted=lifted,
    )

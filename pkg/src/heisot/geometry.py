"""The Heisenberg group H^n under the Koranyi metric.

Points are triples (x, y, z) with x, y in R^n and z in R, multiplied by

    (x, y, z) * (x', y', z') = (x + x', y + y', z + z' + 2 sum_i (x'_i y_i - x_i y'_i)).

The homogeneous norm  ||(x, y, z)|| = ((|x|^2 + |y|^2)^2 + z^2)^(1/4)  induces the
left-invariant metric d(a, b) = ||a^{-1} * b||.  On top of the group law this module
provides the transformation zoo used by the rest of the package: right translations
by multiples of a horizontal vector, horizontal dilations, metric projections onto
vertical lines, the horizontal-alignment test, and the hyperplane of line labels on
which two given points project to the same image.

All types are immutable values and all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "HeisenbergPoint",
    "HorizontalVector",
    "VerticalLine",
    "SeparatingHyperplane",
    "point",
    "origin",
    "group_mul",
    "group_inv",
    "koranyi_norm",
    "distance",
    "right_translate_horizontal",
    "horizontal_dilation",
    "vertical_project",
    "horizontally_aligned",
    "horizontal_displacement",
    "separating_hyperplane",
    "ALIGNMENT_TOL",
]

#: Scale-aware tolerance on the z-component of q^{-1} * q' used by the
#: horizontal-alignment test.
ALIGNMENT_TOL = 1e-9


def _as_vector(value, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float)).copy()
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def _as_scalar(value, name: str) -> float:
    val = float(value)
    if not np.isfinite(val):
        raise ValueError(f"{name} must be finite, got {val}")
    return val


@dataclass(frozen=True, eq=False)
class HeisenbergPoint:
    """A point (x, y, z) of H^n with x, y in R^n and z in R."""

    x: np.ndarray
    y: np.ndarray
    z: float

    def __post_init__(self):
        object.__setattr__(self, "x", _as_vector(self.x, "x"))
        object.__setattr__(self, "y", _as_vector(self.y, "y"))
        object.__setattr__(self, "z", _as_scalar(self.z, "z"))
        if self.x.size != self.y.size:
            raise DimensionMismatchError(
                f"x has length {self.x.size} but y has length {self.y.size}"
            )

    @property
    def dim(self) -> int:
        return self.x.size

    def coords(self) -> np.ndarray:
        """Flat coordinate vector (x_1..x_n, y_1..y_n, z)."""
        return np.concatenate([self.x, self.y, [self.z]])

    def plane(self) -> np.ndarray:
        """Horizontal coordinates (x, y) in R^{2n}."""
        return np.concatenate([self.x, self.y])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HeisenbergPoint)
            and self.dim == other.dim
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and self.z == other.z
        )

    def __hash__(self):
        return hash((self.x.tobytes(), self.y.tobytes(), self.z))

    def __repr__(self):
        return f"HeisenbergPoint(x={self.x.tolist()}, y={self.y.tolist()}, z={self.z})"


@dataclass(frozen=True, eq=False)
class HorizontalVector:
    """A horizontal group element (u, v, 0); its z-component is implicitly zero."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", _as_vector(self.u, "u"))
        object.__setattr__(self, "v", _as_vector(self.v, "v"))
        if self.u.size != self.v.size:
            raise DimensionMismatchError(
                f"u has length {self.u.size} but v has length {self.v.size}"
            )

    @property
    def dim(self) -> int:
        return self.u.size

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(max(np.max(np.abs(self.u)), np.max(np.abs(self.v))) <= tol)

    def norm(self) -> float:
        """Euclidean norm of (u, v) in R^{2n}."""
        return float(np.sqrt(np.dot(self.u, self.u) + np.dot(self.v, self.v)))

    def as_point(self, scale: float = 1.0) -> HeisenbergPoint:
        """The group element (scale*u, scale*v, 0)."""
        return HeisenbergPoint(scale * self.u, scale * self.v, 0.0)

    def __repr__(self):
        return f"HorizontalVector(u={self.u.tolist()}, v={self.v.tolist()})"


@dataclass(frozen=True, eq=False)
class VerticalLine:
    """Label (x~, y~) of the vertical line {(x~, y~, r) : r in R}."""

    x_tilde: np.ndarray
    y_tilde: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x_tilde", _as_vector(self.x_tilde, "x_tilde"))
        object.__setattr__(self, "y_tilde", _as_vector(self.y_tilde, "y_tilde"))
        if self.x_tilde.size != self.y_tilde.size:
            raise DimensionMismatchError(
                f"x_tilde has length {self.x_tilde.size} but y_tilde has length "
                f"{self.y_tilde.size}"
            )

    @property
    def dim(self) -> int:
        return self.x_tilde.size

    def label(self) -> np.ndarray:
        """The label as a vector in R^{2n}."""
        return np.concatenate([self.x_tilde, self.y_tilde])

    def point_at(self, r: float) -> HeisenbergPoint:
        return HeisenbergPoint(self.x_tilde, self.y_tilde, float(r))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VerticalLine)
            and self.dim == other.dim
            and np.array_equal(self.x_tilde, other.x_tilde)
            and np.array_equal(self.y_tilde, other.y_tilde)
        )

    def __hash__(self):
        return hash((self.x_tilde.tobytes(), self.y_tilde.tobytes()))

    def __repr__(self):
        return f"VerticalLine(x_tilde={self.x_tilde.tolist()}, y_tilde={self.y_tilde.tolist()})"


@dataclass(frozen=True, eq=False)
class SeparatingHyperplane:
    """The affine set {(x~, y~) in R^{2n} : a . (x~, y~) = b} of line labels on which
    two given points project to the same image.

    The normal a vanishes exactly when the two generating points share their (x, y)
    coordinates; in that case no vertical line identifies them and the hyperplane is
    flagged degenerate rather than rejected.
    """

    a: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", _as_vector(self.a, "a"))
        object.__setattr__(self, "b", _as_scalar(self.b, "b"))

    @property
    def is_degenerate(self) -> bool:
        return bool(np.all(self.a == 0.0))

    def evaluate(self, line: VerticalLine) -> float:
        """Signed residual a . label - b; zero on the hyperplane."""
        return float(np.dot(self.a, line.label()) - self.b)

    def margin(self, line: VerticalLine) -> float:
        """Euclidean distance from the line label to the hyperplane.

        Degenerate hyperplanes have empty solution set, so every line is
        infinitely far from them.
        """
        if self.is_degenerate:
            return float("inf")
        return abs(self.evaluate(line)) / float(np.linalg.norm(self.a))

    def contains(self, line: VerticalLine, tol: float = 1e-9) -> bool:
        return self.margin(line) <= tol


def point(x, y, z) -> HeisenbergPoint:
    """Convenience constructor accepting scalars, lists, or arrays."""
    return HeisenbergPoint(x, y, z)


def origin(n: int) -> HeisenbergPoint:
    return HeisenbergPoint(np.zeros(n), np.zeros(n), 0.0)


def _check_same_dim(a, b) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")


def group_mul(a: HeisenbergPoint, b: HeisenbergPoint) -> HeisenbergPoint:
    """The group product a * b; the left translation of b by a."""
    _check_same_dim(a, b)
    twist = 2.0 * (float(np.dot(b.x, a.y)) - float(np.dot(a.x, b.y)))
    return HeisenbergPoint(a.x + b.x, a.y + b.y, a.z + b.z + twist)


def group_inv(a: HeisenbergPoint) -> HeisenbergPoint:
    """The group inverse (-x, -y, -z)."""
    return HeisenbergPoint(-a.x, -a.y, -a.z)


def koranyi_norm(a: HeisenbergPoint) -> float:
    """The homogeneous norm ((|x|^2 + |y|^2)^2 + z^2)^(1/4)."""
    s = float(np.dot(a.x, a.x) + np.dot(a.y, a.y))
    return float((s * s + a.z * a.z) ** 0.25)


def distance(a: HeisenbergPoint, b: HeisenbergPoint) -> float:
    """Left-invariant metric ||a^{-1} * b||."""
    return koranyi_norm(group_mul(group_inv(a), b))


def right_translate_horizontal(
    a: HeisenbergPoint, U: HorizontalVector, t: float = 1.0
) -> HeisenbergPoint:
    """Right translation a * (t*u, t*v, 0)."""
    if a.dim != U.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {U.dim}")
    return group_mul(a, U.as_point(float(t)))


def horizontal_dilation(a: HeisenbergPoint, lam: float) -> HeisenbergPoint:
    """Horizontal dilation (lam*x, lam*y, z) for lam >= 0."""
    lam = float(lam)
    if lam < 0.0:
        raise ValueError(f"dilation factor must be nonnegative, got {lam}")
    return HeisenbergPoint(lam * a.x, lam * a.y, a.z)


def vertical_project(a: HeisenbergPoint, line: VerticalLine) -> HeisenbergPoint:
    """Metric projection of a onto the vertical line.

    The projection has the closed form (x~, y~, z + 2(y . x~ - x . y~)); the fact
    that it minimizes the distance to the line is exercised by the property suite.
    """
    if a.dim != line.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {line.dim}")
    z = a.z + 2.0 * (float(np.dot(a.y, line.x_tilde)) - float(np.dot(a.x, line.y_tilde)))
    return HeisenbergPoint(line.x_tilde, line.y_tilde, z)


def horizontally_aligned(
    q: HeisenbergPoint, q2: HeisenbergPoint, tol: float = ALIGNMENT_TOL
) -> bool:
    """True iff a horizontal line passes through both points.

    Equivalently, q2 = q * (tU) for some horizontal vector U, which happens exactly
    when the z-component of q^{-1} * q2 vanishes.  The tolerance is scaled by
    1 + ||q|| + ||q2|| so the test stays meaningful far from the origin.
    """
    delta = group_mul(group_inv(q), q2)
    scale = 1.0 + koranyi_norm(q) + koranyi_norm(q2)
    return abs(delta.z) <= tol * scale


def horizontal_displacement(q: HeisenbergPoint, q2: HeisenbergPoint) -> HorizontalVector:
    """The horizontal part (u, v) of q^{-1} * q2."""
    delta = group_mul(group_inv(q), q2)
    return HorizontalVector(delta.x, delta.y)


def separating_hyperplane(
    q: HeisenbergPoint, q2: HeisenbergPoint
) -> SeparatingHyperplane:
    """The hyperplane of line labels on which q and q2 project to the same point.

    Its equation is (y - y') . x~ + (x' - x) . y~ = (z' - z) / 2.  When q and q2
    share their horizontal coordinates the normal vanishes: for distinct z no line
    identifies them (degenerate hyperplane, empty solution set).
    """
    _check_same_dim(q, q2)
    if q == q2:
        raise ValueError("separating hyperplane requires two distinct points")
    a = np.concatenate([q.y - q2.y, q2.x - q.x])
    b = (q2.z - q.z) / 2.0
    return SeparatingHyperplane(a, b)

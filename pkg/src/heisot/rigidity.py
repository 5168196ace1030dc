"""Rigidity computations for two-point measures on vertical lines.

Measures supported on two points of a vertical line are written with three
parameters (m, sigma, r):

    weight e^{-r}/(e^r + e^{-r})  at height m - sigma e^r,
    weight e^{r}/(e^r + e^{-r})   at height m + sigma e^{-r},

so sigma = 0 collapses to a point mass at height m.  Two candidate actions on the
parameters are studied: the flow (m, sigma, r) -> (m, sigma, r + t) and the shape
flip (m, sigma, r) -> (m, sigma, -r).

``step4_certificate`` runs the computation that rules the shape flip out as an
isometry:
starting from the planar two-point measure with weights (1 +- alpha)/2, it flips
the projections onto three vertical lines, intersects the projection preimages to
form the only image measure compatible with all three, and compares fourth-power
transport costs to the origin Dirac.  The input always has cost 1; the compatible
image costs strictly more (7/4 at alpha = 1/2), so no isometry can act as the flip.

``vertical_translation_gap`` quantifies the companion fact that horizontally
translating one of two vertically supported measures can only increase their
distance, and ``s_plus_minus_sets`` records the pair of constraint sets whose
disjointness (for r != 0) pins the exotic flow parameter to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import (
    HeisenbergPoint,
    HorizontalVector,
    VerticalLine,
    origin,
    right_translate_horizontal,
)
from .measures import (
    DiscreteMeasure,
    dirac,
    make_measure,
    p_cost_to_point,
    push_forward,
    vertical_support_line,
)
from .radon import project_measure
from .transport import solve_wp

__all__ = [
    "TwoPointParams",
    "two_point_measure",
    "two_point_params",
    "exotic_action",
    "shape_flip_action",
    "Step4Report",
    "step4_certificate",
    "vertical_translation_gap",
    "SPlusMinus",
    "s_plus_minus_sets",
]


@dataclass(frozen=True)
class TwoPointParams:
    """Parameters (m, sigma, r) of a one- or two-atom measure on a vertical line."""

    line: VerticalLine
    m: float
    sigma: float
    r: float

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")


def two_point_measure(params: TwoPointParams) -> DiscreteMeasure:
    """The measure described by the parameters; weights always sum to one."""
    line, m, sigma, r = params.line, params.m, params.sigma, params.r
    denom = math.exp(r) + math.exp(-r)
    w_low = math.exp(-r) / denom
    w_high = math.exp(r) / denom
    low = line.point_at(m - sigma * math.exp(r))
    high = line.point_at(m + sigma * math.exp(-r))
    return make_measure([(low, w_low), (high, w_high)])


def two_point_params(mu: DiscreteMeasure) -> TwoPointParams:
    """Invert the parametrization for a one- or two-atom vertical measure.

    With two atoms the weights determine r through the ratio of the upper and
    lower weights, and the heights then fix sigma and m.  A single atom has
    sigma = 0, where r is not identifiable; the convention r = 0 is used.
    """
    if not mu.is_probability:
        raise ValueError("two_point_params requires a probability measure")
    line = vertical_support_line(mu)
    if line is None:
        raise ValueError("measure is not supported on a single vertical line")
    if mu.num_atoms == 1:
        return TwoPointParams(line, float(mu.zs[0]), 0.0, 0.0)
    if mu.num_atoms != 2:
        raise ValueError(f"expected at most two atoms, got {mu.num_atoms}")
    order = np.argsort(mu.zs)
    z_low, z_high = float(mu.zs[order[0]]), float(mu.zs[order[1]])
    w_low, w_high = float(mu.ws[order[0]]), float(mu.ws[order[1]])
    r = 0.5 * math.log(w_high / w_low)
    sigma = (z_high - z_low) / (math.exp(r) + math.exp(-r))
    m = z_low + sigma * math.exp(r)
    return TwoPointParams(line, m, sigma, r)


def exotic_action(params: TwoPointParams, t: float) -> TwoPointParams:
    """The flow (m, sigma, r) -> (m, sigma, r + t)."""
    return TwoPointParams(params.line, params.m, params.sigma, params.r + float(t))


def shape_flip_action(params: TwoPointParams) -> TwoPointParams:
    """The involution (m, sigma, r) -> (m, sigma, -r)."""
    return TwoPointParams(params.line, params.m, params.sigma, -params.r)


@dataclass(frozen=True, eq=False)
class Step4Report:
    """Outcome of the shape-flip exclusion computation for one alpha."""

    alpha: float
    projections: dict
    flipped: dict
    candidate: DiscreteMeasure
    cost_mu: float
    cost_image: float


def _canonical_two_point_input(alpha: float) -> DiscreteMeasure:
    heavy = HeisenbergPoint([1.0], [0.0], 0.0)
    light = HeisenbergPoint([0.0], [1.0], 0.0)
    return make_measure([(heavy, (1.0 + alpha) / 2.0), (light, (1.0 - alpha) / 2.0)])


def step4_certificate(alpha: float) -> Step4Report:
    """Certify that the shape flip cannot come from an isometry.

    The measure ((1+a)/2) delta_{(u,0,0)} + ((1-a)/2) delta_{(0,u,0)} (n = 1,
    u = 1) is projected onto the lines (u,0), (0,u), (u,u); each projection is
    flipped; and the unique planar measure compatible with all three flipped
    projections is assembled by intersecting projection preimages.  The report
    carries the fourth-power costs to the origin Dirac of the input (always 1)
    and of the candidate image (7/4 at alpha = 1/2): the flip inflates the cost,
    so it is not induced by any isometry.

    Higher dimensions embed the same configuration in the first coordinate, so
    the computation is run in its n = 1 form.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    mu = _canonical_two_point_input(alpha)
    w_heavy = (1.0 + alpha) / 2.0
    w_light = (1.0 - alpha) / 2.0

    lines = {
        "u0": VerticalLine([1.0], [0.0]),
        "0u": VerticalLine([0.0], [1.0]),
        "uu": VerticalLine([1.0], [1.0]),
    }
    projections = {}
    flipped = {}
    for key, line in lines.items():
        projected = project_measure(mu, line).projected
        projections[key] = projected
        flipped[key] = two_point_measure(shape_flip_action(two_point_params(projected)))

    def height_of(measure: DiscreteMeasure, weight: float) -> float:
        idx = int(np.argmin(np.abs(measure.ws - weight)))
        if abs(float(measure.ws[idx]) - weight) > 1e-9:
            raise RuntimeError("projection lost the expected weight")
        return float(measure.zs[idx])

    candidate_atoms = []
    for weight in (w_heavy, w_light):
        # Preimage of a height on line (x~, y~) is {z + 2(y x~ - x y~) = z~};
        # intersecting the z = 0 plane with the (u,0) and (0,u) constraints
        # determines (x, y), and the (u,u) constraint must then be consistent.
        y = height_of(flipped["u0"], weight) / 2.0
        x = -height_of(flipped["0u"], weight) / 2.0
        cross = height_of(flipped["uu"], weight)
        if abs(2.0 * (y - x) - cross) > 1e-9:
            raise RuntimeError("flipped projections admit no common preimage")
        candidate_atoms.append((HeisenbergPoint([x], [y], 0.0), weight))
    candidate = make_measure(candidate_atoms)

    base = origin(1)
    return Step4Report(
        alpha=alpha,
        projections=projections,
        flipped=flipped,
        candidate=candidate,
        cost_mu=p_cost_to_point(mu, base, 4.0),
        cost_image=p_cost_to_point(candidate, base, 4.0),
    )


def vertical_translation_gap(
    mu1: DiscreteMeasure, mu2: DiscreteMeasure, U: HorizontalVector, p: float
) -> float:
    """W_p(mu1, translate(mu2)) - W_p(mu1, mu2) for measures on the 0z-axis.

    The gap is nonnegative and vanishes only for the zero translation: moving a
    vertically supported measure off the axis strictly increases its distance to
    any other axis measure.
    """
    for name, mu in (("mu1", mu1), ("mu2", mu2)):
        line = vertical_support_line(mu)
        if line is None or float(np.max(np.abs(line.label()))) > 1e-12:
            raise ValueError(f"{name} must be supported on the 0z-axis")
    translated = push_forward(mu2, lambda q: right_translate_horizontal(q, U, 1.0))
    with_shift = solve_wp(mu1, translated, p).distance
    without = solve_wp(mu1, mu2, p).distance
    return float(with_shift - without)


@dataclass(frozen=True)
class SPlusMinus:
    """Offsets o of the planar constraint lines y_1 = x_1 + o, for both sets."""

    r: float
    s_plus: tuple[float, float]
    s_minus: tuple[float, float]
    disjoint: bool


def s_plus_minus_sets(r: float) -> SPlusMinus:
    """The two constraint sets whose intersection forces the flow parameter to 0.

    S+ is the union of the lines y_1 = x_1 - e^r and y_1 = x_1 + e^{-r}; S- uses
    the opposite signs.  The sets are parallel-line unions, so they are disjoint
    exactly when the offset pairs share no value, which happens iff r != 0.
    """
    r = float(r)
    plus = (-math.exp(r), math.exp(-r))
    minus = (math.exp(r), -math.exp(-r))
    disjoint = all(abs(a - b) > 1e-12 for a in plus for b in minus)
    return SPlusMinus(r=r, s_plus=plus, s_minus=minus, disjoint=disjoint)

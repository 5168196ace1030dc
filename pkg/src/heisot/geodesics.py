"""Geodesic families in the p-Wasserstein space over H^n.

Four constructions are provided:

* complete geodesics obtained by pushing a measure along right translations by
  multiples of a fixed horizontal vector,
* geodesic rays obtained from horizontal dilations, with speed equal to the p-th
  horizontal moment root of the base measure,
* W_1 linear interpolation (1 - t/T) mu + (t/T) nu between equal-mass endpoints,
* branch geodesics: explicit second unit-speed W_1 geodesics between endpoint
  pairs that are not connected by a unique one.

A pair (mu, nu) has a unique W_1 geodesic exactly when mu - nu = c delta_q -
c delta_q' with q, q' not horizontally aligned; ``unique_w1_geodesic`` detects
that shape and ``branch_geodesics`` constructs the extra curves otherwise, either
through a via-point on the horizontal segment (single-atom difference) or by
transporting two pieces of the difference one after the other.

Every curve is exposed as a pure evaluator t -> measure together with its declared
speed, and ``verify_unit_speed`` certifies the speed constant with LP distances on
sampled parameter pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import (
    HeisenbergPoint,
    HorizontalVector,
    distance,
    group_mul,
    horizontal_dilation,
    horizontal_displacement,
    horizontally_aligned,
    right_translate_horizontal,
)
from .measures import (
    DiscreteMeasure,
    add_measures,
    dirac,
    empty_measure,
    horizontal_p_moment,
    jordan_decomposition,
    measures_equal,
    mix_measures,
    push_forward,
    scale_measure,
    subtract_measure,
    vertical_support_line,
)
from .transport import solve_wp

__all__ = [
    "GeodesicCurve",
    "W1Decomposition",
    "SpeedReport",
    "right_translation_curve",
    "dilation_ray",
    "linear_interpolation",
    "verify_unit_speed",
    "unique_w1_geodesic",
    "branch_geodesics",
]

_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class GeodesicCurve:
    """A parametrized family t -> measure with a declared speed constant.

    The domain may be unbounded on either side (math.inf endpoints).  Evaluation
    is pure; slices are rebuilt on every call.
    """

    kind: str
    t_min: float
    t_max: float
    speed: float
    p: float
    evaluator: Callable[[float], DiscreteMeasure]
    params: dict = field(default_factory=dict)

    def at(self, t: float) -> DiscreteMeasure:
        t = float(t)
        if t < self.t_min - _DOMAIN_SLACK or t > self.t_max + _DOMAIN_SLACK:
            raise ValueError(
                f"parameter {t} outside domain [{self.t_min}, {self.t_max}]"
            )
        return self.evaluator(min(max(t, self.t_min), self.t_max))

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.t_min) and math.isfinite(self.t_max)


def right_translation_curve(
    mu: DiscreteMeasure, U: HorizontalVector, p: float = 2.0
) -> GeodesicCurve:
    """The complete geodesic t -> (right translation by tU) # mu, speed ||(u, v)||."""
    if U.is_zero():
        raise ValueError("degenerate: constant curve (zero horizontal vector)")
    if mu.dim != U.dim:
        raise ValueError(f"dimension mismatch: {mu.dim} vs {U.dim}")

    def evaluate(t: float) -> DiscreteMeasure:
        return push_forward(mu, lambda q: right_translate_horizontal(q, U, t))

    return GeodesicCurve(
        kind="right_translation",
        t_min=-math.inf,
        t_max=math.inf,
        speed=U.norm(),
        p=float(p),
        evaluator=evaluate,
        params={"base": mu, "direction": U},
    )


def dilation_ray(mu: DiscreteMeasure, p: float = 2.0) -> GeodesicCurve:
    """The geodesic ray lam -> (horizontal dilation by lam) # mu on [0, inf).

    The speed is the p-th root of the horizontal p-moment of mu.  A base
    supported on the 0z-axis has zero moment and the curve would degenerate to
    a single point, so it is rejected; bases on other vertical lines dilate
    into genuine rays.
    """
    line = vertical_support_line(mu)
    if line is not None and float(np.max(np.abs(line.label()))) <= 1e-12:
        raise ValueError(
            "dilation ray degenerates to a single point on a measure supported "
            "on the 0z-axis"
        )
    p = float(p)
    speed = horizontal_p_moment(mu, p) ** (1.0 / p)

    def evaluate(lam: float) -> DiscreteMeasure:
        return push_forward(mu, lambda q: horizontal_dilation(q, lam))

    return GeodesicCurve(
        kind="dilation_ray",
        t_min=0.0,
        t_max=math.inf,
        speed=speed,
        p=p,
        evaluator=evaluate,
        params={"base": mu},
    )


def linear_interpolation(mu: DiscreteMeasure, nu: DiscreteMeasure) -> GeodesicCurve:
    """The W_1 geodesic t -> (1 - t/T) mu + (t/T) nu on [0, T], T = W_1(mu, nu)."""
    if not (mu.is_probability and nu.is_probability):
        raise ValueError("linear interpolation requires probability endpoints")
    if measures_equal(mu, nu):
        raise ValueError("linear interpolation requires distinct endpoints")
    T = solve_wp(mu, nu, 1.0).distance

    def evaluate(t: float) -> DiscreteMeasure:
        return mix_measures(mu, nu, min(max(t / T, 0.0), 1.0))

    return GeodesicCurve(
        kind="linear_w1",
        t_min=0.0,
        t_max=T,
        speed=1.0,
        p=1.0,
        evaluator=evaluate,
        params={"mu": mu, "nu": nu, "T": T},
    )


@dataclass(frozen=True)
class SpeedReport:
    """Largest deviation of sampled LP distances from speed * |t - s|."""

    max_deviation: float
    passed: bool
    tol: float
    samples: tuple


def _sample_window(curve: GeodesicCurve) -> tuple[float, float]:
    if curve.bounded:
        return curve.t_min, curve.t_max
    if math.isfinite(curve.t_min):
        return curve.t_min, curve.t_min + 2.0
    if math.isfinite(curve.t_max):
        return curve.t_max - 2.0, curve.t_max
    return -1.0, 1.0


def verify_unit_speed(
    curve: GeodesicCurve,
    samples: int = 5,
    tol: float = 1e-8,
    window: Optional[tuple[float, float]] = None,
) -> SpeedReport:
    """Certify the declared speed on all pairs among sampled parameters.

    Distances are computed with the exact LP at the curve's ambient p.  Unbounded
    domains are sampled on a default window around the finite endpoint.
    """
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    lo, hi = window if window is not None else _sample_window(curve)
    ts = np.linspace(lo, hi, samples)
    slices = [curve.at(t) for t in ts]
    worst = 0.0
    for i in range(samples):
        for j in range(i + 1, samples):
            w = solve_wp(slices[i], slices[j], curve.p).distance
            worst = max(worst, abs(w - curve.speed * abs(ts[j] - ts[i])))
    return SpeedReport(worst, worst <= tol, tol, tuple(float(t) for t in ts))


@dataclass(frozen=True, eq=False)
class W1Decomposition:
    """Shape certificate for a uniquely geodesic W_1 pair.

    The endpoints are eta + c delta_q and eta + c delta_q2 with q, q2 not
    horizontally aligned; eta may be the zero measure.
    """

    eta: DiscreteMeasure
    c: float
    q: HeisenbergPoint
    q2: HeisenbergPoint

    def mu(self) -> DiscreteMeasure:
        return add_measures(self.eta, dirac(self.q, self.c))

    def nu(self) -> DiscreteMeasure:
        return add_measures(self.eta, dirac(self.q2, self.c))


def unique_w1_geodesic(
    mu: DiscreteMeasure, nu: DiscreteMeasure
) -> Optional[W1Decomposition]:
    """Detect whether the pair is connected by a unique unit-speed W_1 geodesic.

    Present exactly when mu - nu is a single-atom difference c(delta_q - delta_q2)
    with the two atoms not horizontally aligned; in that case the only geodesic is
    the linear interpolation and every intermediate metric-ratio set is the
    corresponding singleton mixture.
    """
    if not (mu.is_probability and nu.is_probability):
        raise ValueError("unique_w1_geodesic requires probability endpoints")
    if measures_equal(mu, nu):
        raise ValueError("endpoints must be distinct")
    parts = jordan_decomposition(mu, nu)
    pos, neg = parts.positive_part, parts.negative_part
    if pos.num_atoms != 1 or neg.num_atoms != 1:
        return None
    c_pos, c_neg = float(pos.ws[0]), float(neg.ws[0])
    if abs(c_pos - c_neg) > 1e-12:
        return None
    q, q2 = pos.point(0), neg.point(0)
    if horizontally_aligned(q, q2):
        return None
    eta = subtract_measure(mu, pos)
    return W1Decomposition(eta, c_pos, q, q2)


def _piecewise_two_leg(
    eta: DiscreteMeasure,
    still_first: DiscreteMeasure,
    move_first: tuple[DiscreteMeasure, DiscreteMeasure],
    still_second: DiscreteMeasure,
    move_second: tuple[DiscreteMeasure, DiscreteMeasure],
    split_time: float,
    total_time: float,
) -> Callable[[float], DiscreteMeasure]:
    """Evaluator transporting one piece on [0, split_time], the other afterwards."""

    def evaluate(t: float) -> DiscreteMeasure:
        if t <= split_time:
            s = min(max(t / split_time, 0.0), 1.0)
            moving = mix_measures(move_first[0], move_first[1], s)
            return add_measures(eta, add_measures(still_first, moving))
        s = min(max((t - split_time) / (total_time - split_time), 0.0), 1.0)
        moving = mix_measures(move_second[0], move_second[1], s)
        return add_measures(eta, add_measures(still_second, moving))

    return evaluate


def _reverse_curve(curve: GeodesicCurve) -> GeodesicCurve:
    T = curve.t_max

    def evaluate(t: float) -> DiscreteMeasure:
        return curve.evaluator(T - t)

    return GeodesicCurve(
        kind=curve.kind,
        t_min=0.0,
        t_max=T,
        speed=curve.speed,
        p=curve.p,
        evaluator=evaluate,
        params=dict(curve.params, reversed=True),
    )


def branch_geodesics(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    split: Optional[Sequence[int]] = None,
) -> list[GeodesicCurve]:
    """Construct extra unit-speed W_1 geodesics for a non-uniquely-geodesic pair.

    Two shapes arise.  If mu - nu = c(delta_q - delta_q2) with q, q2 horizontally
    aligned, the returned curve detours through eta + c delta_z where z is the
    midpoint of the horizontal segment from q to q2.  Otherwise the difference has
    at least two atoms on one side; that side is split (by default the
    lexicographically first atom against the rest), the other side is split along
    an optimal plan, and the two pieces are transported one after the other in
    both orders.

    ``split`` optionally selects the atom indices of the positive part moved
    first; it must leave strictly positive mass on both sides.
    """
    decomposition = unique_w1_geodesic(mu, nu)
    if decomposition is not None:
        raise ValueError("pair is connected by a unique geodesic; nothing to branch")
    parts = jordan_decomposition(mu, nu)
    pos, neg = parts.positive_part, parts.negative_part

    if pos.num_atoms == 1 and neg.num_atoms == 1:
        # Aligned single-atom difference: branch through the segment midpoint.
        q, q2 = pos.point(0), neg.point(0)
        c = float(pos.ws[0])
        half = horizontal_displacement(q, q2)
        z = right_translate_horizontal(q, half, 0.5)
        eta = subtract_measure(mu, pos)
        xi_atom = dirac(z, c)
        T = solve_wp(mu, nu, 1.0).distance
        T_half = solve_wp(mu, add_measures(eta, xi_atom), 1.0).distance
        evaluate = _piecewise_two_leg(
            eta,
            empty_measure(mu.dim),
            (pos, xi_atom),
            empty_measure(mu.dim),
            (xi_atom, neg),
            T_half,
            T,
        )
        return [
            GeodesicCurve(
                kind="branch",
                t_min=0.0,
                t_max=T,
                speed=1.0,
                p=1.0,
                evaluator=evaluate,
                params={"via": z, "mu": mu, "nu": nu},
            )
        ]

    # Multi-atom difference: split the side with at least two atoms.
    flipped = pos.num_atoms < 2
    if flipped:
        mu, nu = nu, mu
        pos, neg = neg, pos

    if split is None:
        chosen = (0,)
    else:
        chosen = tuple(sorted(set(int(i) for i in split)))
        if any(i < 0 or i >= pos.num_atoms for i in chosen):
            raise ValueError(f"split indices out of range for {pos.num_atoms} atoms")
    if not 0 < len(chosen) < pos.num_atoms:
        raise ValueError(
            "split must leave strictly positive mass on both sides of the difference"
        )

    mask = np.zeros(pos.num_atoms, dtype=bool)
    mask[list(chosen)] = True
    mu1 = DiscreteMeasure(pos.xs[mask], pos.ys[mask], pos.zs[mask], pos.ws[mask])
    mu2 = DiscreteMeasure(pos.xs[~mask], pos.ys[~mask], pos.zs[~mask], pos.ws[~mask])

    plan = solve_wp(pos, neg, 1.0).coupling.mass
    # Clip to the target weights so LP rounding never pushes the piece above neg.
    nu1_ws = np.minimum(plan[mask].sum(axis=0), neg.ws)
    keep = nu1_ws > 1e-15
    nu1 = DiscreteMeasure(neg.xs[keep], neg.ys[keep], neg.zs[keep], nu1_ws[keep])
    nu2 = subtract_measure(neg, nu1)

    eta = subtract_measure(mu, pos)
    T1 = solve_wp(mu1, nu1, 1.0).distance
    T2 = solve_wp(mu2, nu2, 1.0).distance
    T = T1 + T2

    gamma1 = GeodesicCurve(
        kind="branch",
        t_min=0.0,
        t_max=T,
        speed=1.0,
        p=1.0,
        evaluator=_piecewise_two_leg(eta, mu2, (mu1, nu1), nu1, (mu2, nu2), T1, T),
        params={"order": "first_piece_first", "mu": mu, "nu": nu},
    )
    gamma2 = GeodesicCurve(
        kind="branch",
        t_min=0.0,
        t_max=T,
        speed=1.0,
        p=1.0,
        evaluator=_piecewise_two_leg(eta, mu1, (mu2, nu2), nu2, (mu1, nu1), T2, T),
        params={"order": "second_piece_first", "mu": mu, "nu": nu},
    )
    curves = [gamma1, gamma2]
    if flipped:
        curves = [_reverse_curve(c) for c in curves]
    return curves

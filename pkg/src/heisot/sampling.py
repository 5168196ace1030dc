"""Seeded random fixtures shared by the verification suites and the test suite.

Everything draws from an explicit numpy Generator so that runs are reproducible
for a fixed seed.  Coordinates are kept at unit scale, matching the tolerances
used throughout the package.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .geometry import (
    HeisenbergPoint,
    HorizontalVector,
    distance,
    horizontally_aligned,
    right_translate_horizontal,
)
from .measures import DiscreteMeasure, add_measures, dirac, make_measure

__all__ = [
    "random_point",
    "random_points",
    "random_horizontal",
    "random_weights",
    "random_measure",
    "random_axis_measure",
    "random_vertical_measure",
    "random_single_atom_pair",
]


def random_point(rng: np.random.Generator, n: int, scale: float = 1.0) -> HeisenbergPoint:
    return HeisenbergPoint(
        rng.normal(0.0, scale, n), rng.normal(0.0, scale, n), rng.normal(0.0, scale)
    )


def random_points(
    rng: np.random.Generator,
    n: int,
    count: int,
    scale: float = 1.0,
    min_separation: float = 0.0,
) -> list[HeisenbergPoint]:
    """Random points, optionally kept pairwise at least min_separation apart."""
    points: list[HeisenbergPoint] = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise RuntimeError("could not place separated points; lower the count")
        candidate = random_point(rng, n, scale)
        if all(distance(candidate, p) >= min_separation for p in points):
            points.append(candidate)
    return points


def random_horizontal(
    rng: np.random.Generator, n: int, scale: float = 1.0, min_norm: float = 1e-3
) -> HorizontalVector:
    while True:
        hv = HorizontalVector(rng.normal(0.0, scale, n), rng.normal(0.0, scale, n))
        if hv.norm() >= min_norm:
            return hv


def random_weights(
    rng: np.random.Generator, count: int, distinct: bool = False
) -> np.ndarray:
    """Positive weights summing to one; optionally with well-separated values."""
    while True:
        raw = rng.uniform(0.2, 1.0, count)
        weights = raw / raw.sum()
        if not distinct:
            return weights
        if count == 1 or np.min(np.diff(np.sort(weights))) > 1e-3:
            return weights


def random_measure(
    rng: np.random.Generator,
    n: int,
    max_atoms: int = 6,
    scale: float = 1.0,
    uniform: bool = False,
    distinct_weights: bool = False,
    min_separation: float = 0.0,
    num_atoms: Optional[int] = None,
) -> DiscreteMeasure:
    """A random probability measure with between 1 and max_atoms atoms."""
    count = int(num_atoms) if num_atoms is not None else int(rng.integers(1, max_atoms + 1))
    points = random_points(rng, n, count, scale, min_separation)
    if uniform:
        weights = np.full(count, 1.0 / count)
    else:
        weights = random_weights(rng, count, distinct_weights)
    return make_measure(list(zip(points, weights)))


def random_axis_measure(
    rng: np.random.Generator, n: int, max_atoms: int = 5, scale: float = 1.0
) -> DiscreteMeasure:
    """A random probability measure supported on the 0z-axis."""
    count = int(rng.integers(1, max_atoms + 1))
    heights = rng.normal(0.0, scale, count)
    heights += np.arange(count) * 1e-6  # keep atoms distinct
    weights = random_weights(rng, count)
    zeros = np.zeros(n)
    return make_measure(
        [(HeisenbergPoint(zeros, zeros, h), w) for h, w in zip(heights, weights)]
    )


def random_vertical_measure(
    rng: np.random.Generator,
    n: int,
    max_atoms: int = 5,
    scale: float = 1.0,
    line_scale: float = 1.0,
) -> DiscreteMeasure:
    """A random probability measure supported on one random vertical line."""
    xt = rng.normal(0.0, line_scale, n)
    yt = rng.normal(0.0, line_scale, n)
    count = int(rng.integers(1, max_atoms + 1))
    heights = rng.normal(0.0, scale, count) + np.arange(count) * 1e-6
    weights = random_weights(rng, count)
    return make_measure(
        [(HeisenbergPoint(xt, yt, h), w) for h, w in zip(heights, weights)]
    )


def random_single_atom_pair(
    rng: np.random.Generator,
    n: int,
    max_shared_atoms: int = 4,
    scale: float = 1.0,
    aligned: bool = False,
) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """A pair (eta + c delta_q, eta + c delta_q2) of probability measures.

    With aligned=False the moving atoms are kept off every common horizontal
    line (so the pair is uniquely geodesic in W_1); with aligned=True they are
    placed on one.
    """
    shared = int(rng.integers(0, max_shared_atoms + 1))
    c = float(rng.uniform(0.2, 0.6)) if shared else 1.0
    q = random_point(rng, n, scale)
    if aligned:
        direction = random_horizontal(rng, n, scale, min_norm=0.3)
        q2 = right_translate_horizontal(q, direction, 1.0)
    else:
        while True:
            q2 = random_point(rng, n, scale)
            if distance(q, q2) > 0.1 and not horizontally_aligned(q, q2, tol=1e-3):
                break
    mu = dirac(q, c)
    nu = dirac(q2, c)
    if shared:
        points = random_points(rng, n, shared, scale, min_separation=0.1)
        weights = random_weights(rng, shared) * (1.0 - c)
        eta = make_measure(list(zip(points, weights)))
        mu = add_measures(eta, mu)
        nu = add_measures(eta, nu)
    return mu, nu

"""Geodesic constructions and their LP certification."""

import math

import numpy as np
import pytest

from heisot.geodesics import (
    GeodesicCurve,
    branch_geodesics,
    dilation_ray,
    linear_interpolation,
    right_translation_curve,
    unique_w1_geodesic,
    verify_unit_speed,
)
from heisot.geometry import HorizontalVector, origin, point
from heisot.measures import (
    add_measures,
    dirac,
    horizontal_p_moment,
    make_measure,
    measures_equal,
    mix_measures,
    vertical_support_line,
)
from heisot.sampling import (
    random_measure,
    random_single_atom_pair,
    random_vertical_measure,
)
from heisot.transport import solve_wp


def test_right_translation_curve_starts_at_base(rng):
    mu = random_measure(rng, 1, max_atoms=4)
    curve = right_translation_curve(mu, HorizontalVector([1.0], [0.0]), p=2.0)
    assert measures_equal(curve.at(0.0), mu)
    assert not curve.bounded


def test_right_translation_dirac_line():
    curve = right_translation_curve(dirac(origin(1)), HorizontalVector([1.0], [0.0]), p=2.0)
    for t in (-1.0, 0.5, 2.0):
        assert measures_equal(curve.at(t), dirac(point([t], [0.0], 0.0)))
    for s, t in ((0.0, 1.0), (-1.0, 2.0)):
        w = solve_wp(curve.at(s), curve.at(t), 2.0).distance
        assert w == pytest.approx(abs(t - s), abs=1e-12)


def test_right_translation_speed_matches_vector_norm(rng):
    mu = random_measure(rng, 2, max_atoms=4)
    U = HorizontalVector([1.2, 0.0], [0.0, 1.6])  # norm 2
    curve = right_translation_curve(mu, U, p=2.0)
    assert curve.speed == pytest.approx(2.0, abs=1e-15)
    report = verify_unit_speed(curve, samples=4, tol=1e-8)
    assert report.passed, report


def test_right_translation_rejects_zero_vector(rng):
    mu = random_measure(rng, 1)
    with pytest.raises(ValueError, match="constant curve"):
        right_translation_curve(mu, HorizontalVector([0.0], [0.0]))


def test_dilation_ray_dirac_unit_moment():
    mu = dirac(point([1.0], [0.0], 0.0))
    ray = dilation_ray(mu, p=2.0)
    assert ray.speed == pytest.approx(1.0, abs=1e-15)
    assert measures_equal(ray.at(0.0), dirac(origin(1)))
    assert measures_equal(ray.at(1.0), mu)


def test_dilation_ray_speed_from_moment():
    mu = make_measure(
        [(point([1.0], [0.0], 0.0), 0.5), (point([0.0], [1.0], 5.0), 0.5)]
    )
    ray = dilation_ray(mu, p=2.0)
    assert ray.speed == pytest.approx(1.0, abs=1e-15)
    for l1, l2 in ((0.0, 1.0), (0.5, 2.0), (1.0, 1.75)):
        w = solve_wp(ray.at(l1), ray.at(l2), 2.0).distance
        assert w == pytest.approx(abs(l2 - l1) * ray.speed, abs=1e-9)


def test_dilation_ray_rejects_axis_supported_base(rng):
    axis_supported = make_measure(
        [(point([0.0], [0.0], 1.0), 0.5), (point([0.0], [0.0], -2.0), 0.5)]
    )
    with pytest.raises(ValueError, match="0z-axis"):
        dilation_ray(axis_supported, p=2.0)
    # A measure on a different vertical line dilates into a genuine ray.
    off_axis = random_vertical_measure(rng, 1)
    ray = dilation_ray(off_axis, p=2.0)
    assert ray.speed > 0.0


def test_dilation_ray_endpoint_is_vertical(rng):
    for p in (1.5, 2.0, 4.0):
        mu = random_measure(rng, 1, max_atoms=4, min_separation=0.05)
        if vertical_support_line(mu) is not None:
            continue
        ray = dilation_ray(mu, p)
        start = ray.at(0.0)
        line = vertical_support_line(start)
        assert line is not None and np.allclose(line.label(), 0.0)
        assert solve_wp(start, mu, p).distance == pytest.approx(
            ray.speed, abs=1e-8
        )
        assert ray.speed == pytest.approx(
            horizontal_p_moment(mu, p) ** (1.0 / p), abs=1e-15
        )


def test_linear_interpolation_vertical_pair():
    mu = dirac(origin(1))
    nu = dirac(point([0.0], [0.0], 4.0))
    curve = linear_interpolation(mu, nu)
    assert curve.t_max == pytest.approx(2.0, abs=1e-12)  # d = 4^(1/2)
    assert measures_equal(curve.at(0.0), mu)
    midpoint = curve.at(curve.t_max / 2)
    expected = make_measure([(origin(1), 0.5), (point([0.0], [0.0], 4.0), 0.5)])
    assert measures_equal(midpoint, expected, tol=1e-15)
    assert solve_wp(mu, midpoint, 1.0).distance == pytest.approx(1.0, abs=1e-9)


def test_linear_interpolation_unit_speed_on_single_atom_pairs(rng):
    for _ in range(5):
        mu, nu = random_single_atom_pair(rng, int(rng.integers(1, 3)))
        curve = linear_interpolation(mu, nu)
        report = verify_unit_speed(curve, samples=5, tol=1e-8)
        assert report.passed, report


def test_linear_interpolation_rejects_equal_endpoints(rng):
    mu = random_measure(rng, 1)
    with pytest.raises(ValueError, match="distinct"):
        linear_interpolation(mu, mu)


def test_verify_unit_speed_constant_curve():
    mu = dirac(origin(1))
    constant = GeodesicCurve(
        kind="constant", t_min=0.0, t_max=1.0, speed=0.0, p=2.0,
        evaluator=lambda t: mu,
    )
    report = verify_unit_speed(constant, samples=3, tol=1e-12)
    assert report.passed


def test_verify_unit_speed_detects_corruption(rng):
    mu = random_measure(rng, 1, max_atoms=3)
    U = HorizontalVector([1.0], [0.0])
    good = right_translation_curve(mu, U, p=2.0)

    def corrupted(t):
        # The translation distance stops growing past t = 0.5.
        return good.evaluator(min(t, 0.5))

    bad = GeodesicCurve(
        kind="right_translation", t_min=-math.inf, t_max=math.inf,
        speed=good.speed, p=2.0, evaluator=corrupted,
    )
    report = verify_unit_speed(bad, samples=4, tol=1e-8, window=(0.0, 1.0))
    assert not report.passed


def test_verify_unit_speed_needs_two_samples(rng):
    curve = right_translation_curve(random_measure(rng, 1), HorizontalVector([1.0], [0.0]))
    with pytest.raises(ValueError):
        verify_unit_speed(curve, samples=1)


def test_unique_w1_geodesic_vertical_shift():
    shared = dirac(origin(1), 0.5)
    mu = add_measures(shared, dirac(point([0.0], [0.0], 1.0), 0.5))
    nu = add_measures(shared, dirac(point([0.0], [0.0], 4.0), 0.5))
    dec = unique_w1_geodesic(mu, nu)
    assert dec is not None
    assert dec.c == pytest.approx(0.5, abs=1e-15)
    assert dec.q == point([0.0], [0.0], 1.0)
    assert dec.q2 == point([0.0], [0.0], 4.0)
    assert measures_equal(dec.mu(), mu, tol=1e-15)
    assert measures_equal(dec.nu(), nu, tol=1e-15)


def test_unique_w1_geodesic_absent_for_aligned_pair():
    mu = dirac(origin(1))
    nu = dirac(point([1.0], [0.0], 0.0))
    assert unique_w1_geodesic(mu, nu) is None


def test_unique_w1_geodesic_absent_for_multi_atom_difference():
    mu = make_measure([(origin(1), 0.5), (point([0.0], [0.0], 1.0), 0.5)])
    nu = make_measure(
        [(point([1.0], [1.0], 0.0), 0.5), (point([-1.0], [0.5], 2.0), 0.5)]
    )
    assert unique_w1_geodesic(mu, nu) is None


def test_unique_w1_geodesic_rejects_equal_endpoints(rng):
    mu = random_measure(rng, 1)
    with pytest.raises(ValueError):
        unique_w1_geodesic(mu, mu)


def test_branch_geodesics_aligned_dirac_pair():
    mu = dirac(origin(1))
    nu = dirac(point([2.0], [0.0], 0.0))
    curves = branch_geodesics(mu, nu)
    assert len(curves) == 1
    curve = curves[0]
    assert curve.t_max == pytest.approx(2.0, abs=1e-12)
    assert measures_equal(curve.at(1.0), dirac(point([1.0], [0.0], 0.0)), tol=1e-12)
    report = verify_unit_speed(curve, samples=5, tol=1e-8)
    assert report.passed, report
    # The detour differs from the two-atom linear interpolation midway.
    linear = linear_interpolation(mu, nu)
    midpoint_gap = solve_wp(curve.at(1.0), linear.at(1.0), 1.0).distance
    assert midpoint_gap > 1e-3


def test_branch_geodesics_two_orders_for_multi_atom_difference(rng):
    mu = make_measure(
        [(point([0.0], [0.0], 1.0), 0.5), (point([1.0], [0.0], 0.0), 0.5)]
    )
    nu = make_measure(
        [(point([2.0], [1.0], 0.5), 0.5), (point([-1.0], [1.0], -0.5), 0.5)]
    )
    curves = branch_geodesics(mu, nu)
    assert len(curves) == 2
    for curve in curves:
        assert measures_equal(curve.at(0.0), mu, tol=1e-12)
        assert measures_equal(curve.at(curve.t_max), nu, tol=1e-12)
        report = verify_unit_speed(curve, samples=5, tol=1e-8)
        assert report.passed, report
    # The two transport orders pass through different measures.
    t = curves[0].t_max / 3.0
    assert solve_wp(curves[0].at(t), curves[1].at(t), 1.0).distance > 1e-6
    # And both differ from the linear interpolation somewhere.
    linear = linear_interpolation(mu, nu)
    for curve in curves:
        gaps = [
            solve_wp(curve.at(s), linear.at(s), 1.0).distance
            for s in np.linspace(0.1, 0.9, 4) * curve.t_max
        ]
        assert max(gaps) > 1e-6


def test_branch_geodesics_rejects_uniquely_geodesic_pairs(rng):
    mu, nu = random_single_atom_pair(rng, 1)
    with pytest.raises(ValueError, match="unique geodesic"):
        branch_geodesics(mu, nu)


def test_branch_geodesics_rejects_degenerate_split():
    mu = make_measure(
        [(point([0.0], [0.0], 1.0), 0.5), (point([1.0], [0.0], 0.0), 0.5)]
    )
    nu = make_measure(
        [(point([2.0], [1.0], 0.5), 0.5), (point([-1.0], [1.0], -0.5), 0.5)]
    )
    with pytest.raises(ValueError, match="split"):
        branch_geodesics(mu, nu, split=[])
    with pytest.raises(ValueError, match="split"):
        branch_geodesics(mu, nu, split=[0, 1])


def test_dilation_scalar_inequality(rng):
    # sum |1 - lam|^p a_i^p <= sum |a_{i+1} - lam a_i|^p  (cyclic indexing).
    for size in range(2, 9):
        lam = rng.uniform(0.0, 4.0, size=(1500, 1))
        p = rng.uniform(1.0, 6.0, size=(1500, 1))
        a = rng.uniform(0.0, 3.0, size=(1500, size))
        lhs = np.sum(np.abs(1.0 - lam) ** p * a**p, axis=1)
        rhs = np.sum(np.abs(np.roll(a, -1, axis=1) - lam * a) ** p, axis=1)
        assert np.all(lhs <= rhs + 1e-12 * (1.0 + rhs))


def test_cycle_shift_jensen_inequality(rng):
    # ||shift||^p <= (1/N) sum ||q_{i+1} - (q_i + shift)||^p on point cycles.
    for _ in range(2000):
        size = int(rng.integers(2, 9))
        dim = 2 * int(rng.integers(1, 3))
        pts = rng.normal(0, 1, size=(size, dim))
        shift = rng.normal(0, 1, dim) * rng.uniform(-2, 2)
        p = float(rng.uniform(1.0, 6.0))
        rhs = float(np.mean(np.linalg.norm(np.roll(pts, -1, axis=0) - pts - shift, axis=1) ** p))
        lhs = float(np.linalg.norm(shift) ** p)
        assert lhs <= rhs + 1e-12 * (1.0 + rhs)


def test_adversarial_midpoints_fail_on_unique_pairs(rng):
    mu, nu = random_single_atom_pair(rng, 1)
    T = solve_wp(mu, nu, 1.0).distance
    midpoint = mix_measures(mu, nu, 0.5)
    assert solve_wp(mu, midpoint, 1.0).distance == pytest.approx(T / 2, abs=1e-9)
    assert solve_wp(midpoint, nu, 1.0).distance == pytest.approx(T / 2, abs=1e-9)
    failures = 0
    for _ in range(20):
        atoms = list(midpoint.atoms())
        i = int(rng.integers(0, len(atoms)))
        pt, w = atoms[i]
        jitter = rng.normal(0.0, 0.05, 1)
        from heisot.geometry import HeisenbergPoint

        atoms[i] = (
            HeisenbergPoint(pt.x + jitter, pt.y - jitter, pt.z + float(rng.normal(0, 0.05))),
            w,
        )
        candidate = make_measure(atoms)
        if measures_equal(candidate, midpoint, tol=1e-12):
            continue
        err = max(
            abs(solve_wp(mu, candidate, 1.0).distance - T / 2),
            abs(solve_wp(candidate, nu, 1.0).distance - T / 2),
        )
        if err > 1e-9:
            failures += 1
    assert failures == 20

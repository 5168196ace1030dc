"""Acceptance gate: one test per criterion, at the stated tolerance and budget.

Each test prints a single PASS line once its criterion holds, so running

    pytest tests/test_acceptance.py -v -s

produces a per-criterion scoreboard.
"""

import itertools
import time

import numpy as np
import pytest

from heisot.geodesics import (
    branch_geodesics,
    dilation_ray,
    linear_interpolation,
    unique_w1_geodesic,
    verify_unit_speed,
)
from heisot.geometry import (
    HeisenbergPoint,
    HorizontalVector,
    distance,
    horizontal_dilation,
    origin,
    point,
    right_translate_horizontal,
)
from heisot.lifting import (
    certify_lift,
    lift_map,
    plane_dilation,
    plane_map_from_coupling,
    plane_projection_measure,
    plane_translation,
)
from heisot.measures import (
    dirac,
    horizontal_p_moment,
    make_measure,
    measures_equal,
    mix_measures,
)
from heisot.radon import oracle_from_measure, reconstruct
from heisot.rigidity import step4_certificate, vertical_translation_gap
from heisot.sampling import (
    random_axis_measure,
    random_horizontal,
    random_measure,
    random_single_atom_pair,
)
from heisot.transport import Coupling, cyclically_monotone, solve_wp, verify_map_optimality


def report(line):
    print(f"\n[PASS] {line}")


def test_criterion_1_step4_certificate():
    start = time.perf_counter()
    at_half = step4_certificate(0.5)
    assert abs(at_half.cost_mu - 1.0) <= 1e-12
    assert abs(at_half.cost_image - 7.0 / 4.0) <= 1e-12
    margins = []
    for alpha in np.linspace(0.01, 0.99, 99):
        rep = step4_certificate(float(alpha))
        assert abs(rep.cost_mu - 1.0) <= 1e-12
        margins.append(rep.cost_image - rep.cost_mu)
    assert min(margins) > 0.0
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(
        "criterion 1: step-4 certificate (1, 7/4) at alpha=1/2 within 1e-12; "
        f"99-point grid strictly increasing cost; {elapsed:.2f}s"
    )


def test_criterion_2_lp_matches_permutation_oracle():
    rng = np.random.default_rng(1002)
    start = time.perf_counter()
    worst = 0.0
    for trial in range(200):
        n = 1 + trial % 2
        k = int(rng.integers(1, 7))
        p = (1.0, 1.5, 2.0, 4.0)[trial % 4]
        mu = random_measure(rng, n, uniform=True, num_atoms=k)
        nu = random_measure(rng, n, uniform=True, num_atoms=k)
        lp_cost = solve_wp(mu, nu, p).cost_p
        best = min(
            sum(distance(mu.point(i), nu.point(perm[i])) ** p for i in range(k)) / k
            for perm in itertools.permutations(range(k))
        )
        worst = max(worst, abs(lp_cost - best))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-10
    assert elapsed < 30.0
    report(
        f"criterion 2: LP equals brute-force permutation optimum on 200 pairs "
        f"(max |diff| {worst:.2e}); {elapsed:.1f}s"
    )


def test_criterion_3_right_translations_are_optimal():
    rng = np.random.default_rng(1003)
    worst = 0.0
    for trial in range(100):
        n = 1 + trial % 2
        p = (1.5, 2.0, 3.0, 4.0)[trial % 4]
        mu = random_measure(rng, n, max_atoms=6)
        U = random_horizontal(rng, n)
        t = float(rng.uniform(-5.0, 5.0))
        gap = verify_map_optimality(
            mu, lambda q: right_translate_horizontal(q, U, t), p
        ).gap
        worst = max(worst, abs(gap))
    assert worst <= 1e-8
    report(f"criterion 3: right-translation optimality gaps <= 1e-8 (max {worst:.2e})")


def test_criterion_4_horizontal_dilations_and_ray_speeds():
    rng = np.random.default_rng(1004)
    worst_gap = 0.0
    worst_speed = 0.0
    for trial in range(100):
        n = 1 + trial % 2
        p = (1.5, 2.0, 3.0, 4.0)[trial % 4]
        mu = random_measure(rng, n, max_atoms=6, min_separation=0.05)
        if horizontal_p_moment(mu, p) == 0.0:
            continue
        lam = float(rng.uniform(0.0, 2.0))
        gap = verify_map_optimality(mu, lambda q: horizontal_dilation(q, lam), p).gap
        worst_gap = max(worst_gap, abs(gap))
        ray = dilation_ray(mu, p)
        expected_speed = horizontal_p_moment(mu, p) ** (1.0 / p)
        for _ in range(5):
            l1, l2 = rng.uniform(0.0, 2.0, 2)
            w = solve_wp(ray.at(l1), ray.at(l2), p).distance
            worst_speed = max(worst_speed, abs(w - expected_speed * abs(l1 - l2)))
    assert worst_gap <= 1e-8
    assert worst_speed <= 1e-8
    report(
        "criterion 4: dilation maps optimal and ray speeds match the horizontal "
        f"moment root (max gap {worst_gap:.2e}, max speed dev {worst_speed:.2e})"
    )


def test_criterion_5_scalar_inequality_suites():
    rng = np.random.default_rng(1005)
    # Cyclic dilation inequality, 10^4 draws.
    violations = 0
    for size in range(2, 9):
        count = 10_000 // 7 + 1
        lam = rng.uniform(0.0, 4.0, size=(count, 1))
        p = rng.uniform(1.0, 6.0, size=(count, 1))
        a = rng.uniform(0.0, 3.0, size=(count, size))
        lhs = np.sum(np.abs(1.0 - lam) ** p * a**p, axis=1)
        rhs = np.sum(np.abs(np.roll(a, -1, axis=1) - lam * a) ** p, axis=1)
        violations += int(np.sum(lhs > rhs + 1e-12 * (1.0 + rhs)))
    assert violations == 0
    # Norm inequality, 10^4 draws.
    norms = np.linalg.norm(rng.normal(0.0, 2.0, size=(10_000, 4)), axis=1)
    ps = rng.uniform(1.0, 8.0, 10_000)
    lhs = norms ** (ps - 1.0) + norms
    rhs = 1.0 + norms**ps
    assert int(np.sum(lhs > rhs + 1e-12 * (1.0 + rhs))) == 0
    report("criterion 5: both scalar inequality suites hold with zero violations")


def test_criterion_6_radon_round_trip():
    rng = np.random.default_rng(1006)
    start = time.perf_counter()
    worst = 0.0
    for trial in range(100):
        n = 1 + trial % 2
        mu = random_measure(
            rng, n, max_atoms=8, min_separation=0.1, distinct_weights=True
        )
        recovered = reconstruct(
            oracle_from_measure(mu), n, 8, seed=int(rng.integers(0, 2**31))
        )
        worst = max(worst, solve_wp(recovered, mu, 1.0).distance)
    elapsed = time.perf_counter() - start
    assert worst <= 1e-6
    assert elapsed < 60.0
    report(
        f"criterion 6: 100 Radon round trips within W1 error 1e-6 "
        f"(max {worst:.2e}); {elapsed:.1f}s"
    )


def test_criterion_7_vertical_translation_inequality():
    rng = np.random.default_rng(1007)
    worst_negative = 0.0
    for trial in range(1000):
        n = 1 + trial % 2
        p = (1.0, 1.5, 2.0, 4.0)[trial % 4]
        mu1 = random_axis_measure(rng, n)
        mu2 = random_axis_measure(rng, n)
        zero = HorizontalVector(np.zeros(n), np.zeros(n))
        assert abs(vertical_translation_gap(mu1, mu2, zero, p)) <= 1e-9
        U = random_horizontal(rng, n, min_norm=1e-3)
        gap = vertical_translation_gap(mu1, mu2, U, p)
        worst_negative = min(worst_negative, gap)
        assert gap >= -1e-9
        if U.norm() >= 0.1:
            assert gap > 1e-6
    report(
        "criterion 7: vertical translation gap nonnegative on 1000 trials, "
        f"strictly positive for ||U|| >= 0.1 (most negative {worst_negative:.2e})"
    )


def test_criterion_8_lift_end_to_end():
    rng = np.random.default_rng(1008)
    worst_lifted = 0.0
    worst_identity = 0.0
    qualifying = 0
    for trial in range(100):
        n = 1 + trial % 2
        p = (1.5, 2.0, 3.0, 4.0)[trial % 4]
        kind = trial % 3
        plane_map = None
        if kind == 2:
            nu = random_measure(rng, n, max_atoms=6, uniform=True, min_separation=0.05)
            mu_plane = plane_projection_measure(nu)
            if mu_plane.num_atoms == nu.num_atoms:
                target = plane_projection_measure(
                    random_measure(rng, n, uniform=True, num_atoms=nu.num_atoms,
                                   min_separation=0.05)
                )
                vertex = solve_wp(mu_plane, target, p, cost="euclidean_plane")
                try:
                    plane_map = plane_map_from_coupling(vertex.coupling)
                except ValueError:
                    plane_map = None
        if plane_map is None:
            nu = random_measure(rng, n, max_atoms=6)
            if kind == 1:
                plane_map = plane_dilation(float(rng.uniform(0, 2)))
            else:
                plane_map = plane_translation(rng.normal(0, 1, n), rng.normal(0, 1, n))
        rep = certify_lift(nu, plane_map, p)
        if rep.plane_gap <= 1e-8:
            qualifying += 1
            worst_lifted = max(worst_lifted, abs(rep.lifted_gap))
        # Cost equality of the lift, relative tolerance 1e-12.
        lifted = lift_map(plane_map)
        plane_cost = sum(
            w * float(np.linalg.norm(plane_map(q.plane()) - q.plane())) ** p
            for q, w in nu.atoms()
        )
        heis_cost = sum(w * distance(q, lifted(q)) ** p for q, w in nu.atoms())
        worst_identity = max(
            worst_identity,
            abs(plane_cost - heis_cost) / max(1.0, plane_cost, heis_cost),
        )
    assert qualifying >= 90
    assert worst_lifted <= 1e-8
    assert worst_identity <= 1e-12
    report(
        f"criterion 8: {qualifying} optimal plane maps lift to optimal maps "
        f"(max lifted gap {worst_lifted:.2e}); cost identity within "
        f"{worst_identity:.2e} relative"
    )


def test_criterion_9_w1_geodesics():
    rng = np.random.default_rng(1009)
    # Linear interpolation on uniquely geodesic pairs is unit speed.
    worst_speed = 0.0
    for trial in range(10):
        n = 1 + trial % 2
        mu, nu = random_single_atom_pair(rng, n)
        assert unique_w1_geodesic(mu, nu) is not None
        curve = linear_interpolation(mu, nu)
        rep = verify_unit_speed(curve, samples=5, tol=1e-8)
        assert rep.passed
        worst_speed = max(worst_speed, rep.max_deviation)

    # Branch geodesics on non-unique pairs: certified and distinct from linear.
    branched = 0
    for trial in range(10):
        n = 1 + trial % 2
        if trial % 2 == 0:
            mu, nu = random_single_atom_pair(rng, n, aligned=True)
        else:
            mu = random_measure(rng, n, num_atoms=3, min_separation=0.2)
            nu = random_measure(rng, n, num_atoms=3, min_separation=0.2)
            if unique_w1_geodesic(mu, nu) is not None:
                continue
        curves = branch_geodesics(mu, nu)
        assert curves
        linear = linear_interpolation(mu, nu)
        for curve in curves:
            rep = verify_unit_speed(curve, samples=5, tol=1e-8)
            assert rep.passed
        gaps = [
            solve_wp(curves[0].at(s), linear.at(s), 1.0).distance
            for s in np.linspace(0.1, 0.9, 4) * curves[0].t_max
        ]
        assert max(gaps) > 1e-6
        branched += 1
    assert branched >= 8

    # Adversarial midpoint search fails on uniquely geodesic pairs.
    for trial in range(5):
        mu, nu = random_single_atom_pair(rng, 1)
        T = solve_wp(mu, nu, 1.0).distance
        midpoint = mix_measures(mu, nu, 0.5)
        assert abs(solve_wp(mu, midpoint, 1.0).distance - T / 2) <= 1e-9
        assert abs(solve_wp(midpoint, nu, 1.0).distance - T / 2) <= 1e-9
        rejected = 0
        for _ in range(20):
            atoms = list(midpoint.atoms())
            i = int(rng.integers(0, len(atoms)))
            pt, w = atoms[i]
            jitter = rng.normal(0.0, 0.05, pt.dim)
            atoms[i] = (
                HeisenbergPoint(pt.x + jitter, pt.y - jitter,
                                pt.z + float(rng.normal(0, 0.05))),
                w,
            )
            candidate = make_measure(atoms)
            if measures_equal(candidate, midpoint, tol=1e-12):
                continue
            err = max(
                abs(solve_wp(mu, candidate, 1.0).distance - T / 2),
                abs(solve_wp(candidate, nu, 1.0).distance - T / 2),
            )
            assert err > 1e-9
            rejected += 1
        assert rejected == 20
    report(
        "criterion 9: unit-speed linear interpolation on unique pairs "
        f"(max dev {worst_speed:.2e}); {branched} branch constructions certified; "
        "all 20-trial adversarial midpoints rejected"
    )


def test_criterion_10_cyclical_monotonicity():
    rng = np.random.default_rng(1010)
    for trial in range(100):
        n = 1 + trial % 2
        p = (1.0, 1.5, 2.0, 4.0)[trial % 4]
        k = int(rng.integers(2, 7))
        mu = random_measure(rng, n, uniform=True, num_atoms=k)
        nu = random_measure(rng, n, uniform=True, num_atoms=k)
        result = solve_wp(mu, nu, p)
        certificate = cyclically_monotone(result.coupling, p, max_cycle=4)
        assert certificate.ok, f"violating cycle {certificate.cycle}"

    # Canonical counterexample: swapping a nearest-target assignment.
    mu = make_measure([(origin(1), 0.5), (point([3.0], [0.0], 0.0), 0.5)])
    nu = make_measure(
        [(point([0.5], [0.0], 0.0), 0.5), (point([3.5], [0.0], 0.0), 0.5)]
    )
    optimal = solve_wp(mu, nu, 2.0)
    assert cyclically_monotone(optimal.coupling, 2.0, max_cycle=2).ok
    swapped = Coupling(mu, nu, np.array([[0.0, 0.5], [0.5, 0.0]]))
    certificate = cyclically_monotone(swapped, 2.0, max_cycle=2)
    assert not certificate.ok
    assert certificate.cycle is not None and len(certificate.cycle) == 2
    assert certificate.slack < 0
    report(
        "criterion 10: all 100 optimal plans cyclically monotone to length 4; "
        f"swapped plan rejected with a 2-cycle of slack {certificate.slack:.3f}"
    )

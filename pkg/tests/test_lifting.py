"""Plane-map lifting and optimality certification."""

import numpy as np
import pytest

from heisot.errors import NotInducedByMapError
from heisot.geometry import HorizontalVector, distance, right_translate_horizontal, horizontal_dilation
from heisot.lifting import (
    certify_lift,
    lift_map,
    plane_dilation,
    plane_map_from_coupling,
    plane_map_from_pairs,
    plane_projection_measure,
    plane_translation,
    push_forward_plane,
)
from heisot.measures import dirac, make_measure, measures_equal
from heisot.geometry import point, origin
from heisot.sampling import random_measure, random_point
from heisot.transport import solve_wp


def test_plane_projection_measure_examples():
    q = point([0.5, -1.0], [2.0, 0.25], 3.0)
    flat = plane_projection_measure(dirac(q))
    assert measures_equal(flat, dirac(point([0.5, -1.0], [2.0, 0.25], 0.0)))
    vertical_pair = make_measure(
        [(point([1.0], [0.0], 3.0), 0.5), (point([1.0], [0.0], -3.0), 0.5)]
    )
    assert measures_equal(
        plane_projection_measure(vertical_pair), dirac(point([1.0], [0.0], 0.0))
    )


def test_lift_of_identity_is_identity(rng):
    identity = plane_translation([0.0], [0.0])
    lifted = lift_map(identity)
    for _ in range(10):
        q = random_point(rng, 1)
        assert lifted(q) == q


def test_lift_of_translation_is_right_translation(rng):
    for _ in range(10):
        n = int(rng.integers(1, 3))
        u, v = rng.normal(0, 1, n), rng.normal(0, 1, n)
        lifted = lift_map(plane_translation(u, v))
        U = HorizontalVector(u, v)
        q = random_point(rng, n)
        expected = right_translate_horizontal(q, U, 1.0)
        assert np.allclose(lifted(q).coords(), expected.coords(), atol=1e-12)


def test_lift_of_dilation_is_horizontal_dilation(rng):
    for lam in (0.0, 0.5, 2.0):
        lifted = lift_map(plane_dilation(lam))
        q = random_point(rng, 2)
        expected = horizontal_dilation(q, lam)
        assert np.allclose(lifted(q).coords(), expected.coords(), atol=1e-12)


def test_lift_cost_equality(rng):
    # The lifted displacement is horizontal, so Heisenberg and Euclidean
    # per-atom costs agree to machine precision.
    for _ in range(20):
        n = int(rng.integers(1, 3))
        nu = random_measure(rng, n, max_atoms=6)
        p = float(rng.choice([1.5, 2.0, 4.0]))
        plane_map = plane_translation(rng.normal(0, 1, n), rng.normal(0, 1, n))
        lifted = lift_map(plane_map)
        plane_cost = sum(
            w * float(np.linalg.norm(plane_map(q.plane()) - q.plane())) ** p
            for q, w in nu.atoms()
        )
        heis_cost = sum(w * distance(q, lifted(q)) ** p for q, w in nu.atoms())
        assert abs(plane_cost - heis_cost) <= 1e-12 * max(1.0, plane_cost)


def test_projection_contracts_distances(rng):
    for _ in range(200):
        n = int(rng.integers(1, 3))
        q, q2 = random_point(rng, n), random_point(rng, n)
        assert distance(q, q2) >= float(np.linalg.norm(q.plane() - q2.plane())) - 1e-12


def test_certify_lift_identity():
    nu = make_measure([(point([1.0], [0.0], 2.0), 0.5), (origin(1), 0.5)])
    report = certify_lift(nu, plane_translation([0.0], [0.0]), 2.0)
    assert report.plane_gap == pytest.approx(0.0, abs=1e-15)
    assert report.lifted_gap == pytest.approx(0.0, abs=1e-15)


def test_certify_lift_translations_and_dilations(rng):
    for _ in range(10):
        n = int(rng.integers(1, 3))
        nu = random_measure(rng, n, max_atoms=5)
        p = float(rng.choice([1.5, 2.0, 4.0]))
        for plane_map in (
            plane_translation(rng.normal(0, 1, n), rng.normal(0, 1, n)),
            plane_dilation(float(rng.uniform(0, 2))),
        ):
            report = certify_lift(nu, plane_map, p)
            assert report.plane_gap <= 1e-8
            assert report.lifted_gap <= 1e-8


def test_certify_lift_with_plane_lp_vertex_map(rng):
    nu = random_measure(rng, 1, num_atoms=4, uniform=True, min_separation=0.1)
    mu_plane = plane_projection_measure(nu)
    target = plane_projection_measure(
        random_measure(rng, 1, num_atoms=4, uniform=True, min_separation=0.1)
    )
    result = solve_wp(mu_plane, target, 2.0, cost="euclidean_plane")
    plane_map = plane_map_from_coupling(result.coupling)
    report = certify_lift(nu, plane_map, 2.0)
    assert report.plane_gap <= 1e-8
    assert report.lifted_gap <= 1e-8


def test_certify_lift_flags_suboptimal_plane_map():
    # Swapping two far-apart targets is strictly worse in the plane.
    nu = make_measure(
        [(origin(1), 0.5), (point([3.0], [0.0], 0.0), 0.5)]
    )
    swapped = plane_map_from_pairs(
        [
            (np.array([0.0, 0.0]), np.array([3.5, 0.0])),
            (np.array([3.0, 0.0]), np.array([0.5, 0.0])),
        ]
    )
    report = certify_lift(nu, swapped, 2.0)
    assert report.plane_gap > 0.1


def test_plane_map_from_coupling_rejects_split_rows():
    mu = make_measure([(origin(1), 1.0)])
    nu = make_measure(
        [(point([1.0], [0.0], 0.0), 0.5), (point([-1.0], [0.0], 0.0), 0.5)]
    )
    result = solve_wp(plane_projection_measure(mu), plane_projection_measure(nu), 2.0,
                      cost="euclidean_plane")
    with pytest.raises(NotInducedByMapError, match="not induced by a map"):
        plane_map_from_coupling(result.coupling)


def test_lookup_map_is_partial(rng):
    table = plane_map_from_pairs([(np.array([0.0, 0.0]), np.array([1.0, 1.0]))])
    assert np.allclose(table(np.array([0.0, 0.0])), [1.0, 1.0])
    with pytest.raises(ValueError, match="undefined"):
        table(np.array([5.0, 5.0]))


def test_push_forward_plane_merges_collisions():
    mu_plane = plane_projection_measure(
        make_measure(
            [(point([1.0], [0.0], 0.0), 0.5), (point([-1.0], [0.0], 0.0), 0.5)]
        )
    )
    collapsed = push_forward_plane(mu_plane, plane_dilation(0.0))
    assert collapsed.num_atoms == 1
    assert collapsed.total_mass() == pytest.approx(1.0, abs=1e-15)

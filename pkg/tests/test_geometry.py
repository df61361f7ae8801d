import math

import numpy as np
import pytest

from eisenlab.catalog import SystemSpec, build_system, reference_start, sample_points
from eisenlab.core import Observable, PhasePoint, coordinate_observable
from eisenlab.dynamics import integrate
from eisenlab.errors import ArgumentError, DegreeError, DomainError
from eisenlab.geometry import (MetricField, catalog_metric, catalog_potential, christoffel,
                               diagonal_metric, eisenhart_lift, euclidean, extract_killing_tensor,
                               geodesic_hamiltonian, geodesic_residual, killing_check,
                               killing_dimension, scalar_curvature_probe)
from eisenlab.jets import sin

import oracles

POLAR = diagonal_metric(2, lambda q: [1.0, q[0] * q[0]], name="polar")


def test_flat_metric_has_no_connection():
    assert np.array_equal(christoffel(euclidean(3), [0.3, -1.0, 2.0]), np.zeros((3, 3, 3)))
    assert scalar_curvature_probe(euclidean(3), [0.3, -1.0, 2.0]) == 0.0


def test_polar_christoffel_symbols():
    gam = christoffel(POLAR, [2.0, 0.7])
    expected = np.zeros((2, 2, 2))
    expected[0, 1, 1] = -2.0
    expected[1, 0, 1] = expected[1, 1, 0] = 0.5
    assert np.allclose(gam, expected, atol=1e-15)
    assert abs(scalar_curvature_probe(POLAR, [2.0, 0.7])) < 1e-13


def test_round_sphere_curvature():
    R = 2.0
    sphere = diagonal_metric(2, lambda q: [R * R, R * R * sin(q[0]) ** 2], name="sphere")
    for theta in (0.4, 1.1, 2.0):
        assert scalar_curvature_probe(sphere, [theta, 0.3]) == pytest.approx(2 / R**2, rel=1e-12)


def test_lift_with_unit_potential_is_free_motion():
    _, T = eisenhart_lift(euclidean(2), lambda q: 1.0)
    z = PhasePoint([0.1, 0.2, 0.3], [1.0, -2.0, 0.5])
    assert T(z) == pytest.approx(0.5 * (1 + 4 + 0.25))


def test_lift_of_family_a_matches_catalog_value():
    spec = SystemSpec("a", "Geodesic3D", (1.0, 1.0, 1.0))
    _, T = eisenhart_lift(euclidean(2), catalog_potential(spec))
    z = PhasePoint([1.0, 1.0, 0.0], [0.0, 0.0, math.sqrt(2.0)])
    assert T(z) == pytest.approx(3.0, abs=1e-15)
    assert T(z) == pytest.approx(build_system(spec).hamiltonian(z), rel=1e-14)


def test_lifted_metric_component_for_coulomb_family():
    g3, _ = eisenhart_lift(euclidean(2), catalog_potential(SystemSpec("c", "Geodesic3D", (1, 0, 0))))
    assert g3.matrix([3.0, 4.0, 0.0])[2, 2] == pytest.approx(5.0, abs=1e-14)


def test_lift_requires_positive_potential():
    g3, T = eisenhart_lift(euclidean(2), lambda q: q[0] - 1.0)
    with pytest.raises(DomainError):
        g3.matrix([0.5, 0.0, 0.0])
    with pytest.raises(DomainError):
        T(PhasePoint([0.5, 0.0, 0.0], [1.0, 0.0, 0.0]))


def test_lifted_christoffel_from_potential_gradient():
    spec = SystemSpec.default("b", "Geodesic3D")
    g = catalog_metric(spec)
    V = catalog_potential(spec)
    q = [0.7, 1.2, 0.0]
    h = 1e-5
    dVx = (V([q[0] + h, q[1]]) - V([q[0] - h, q[1]])) / (2 * h)
    gam = christoffel(g, q)
    assert gam[2, 0, 2] == pytest.approx(-dVx / (2 * V(q)), rel=1e-8)


def test_geodesic_residual_free_particle():
    T = geodesic_hamiltonian(euclidean(3))
    traj = integrate(T, PhasePoint([0.0, 0.0, 0.0], [1.0, 0.5, -0.2]), 1.0, 1e-2)
    assert geodesic_residual(euclidean(3), traj, mode="fd") <= 1e-12
    assert geodesic_residual(euclidean(3), traj, mode="flow") <= 1e-12


def test_geodesic_residual_polar():
    traj = integrate(geodesic_hamiltonian(POLAR), PhasePoint([1.5, 0.2], [0.3, 0.8]), 2.0, 1e-3)
    assert geodesic_residual(POLAR, traj, mode="fd") <= 1e-7


def test_geodesic_residual_family_a():
    spec = SystemSpec("a", "Geodesic3D", (1.0, 1.0, 1.0))
    s = build_system(spec)
    traj = integrate(s.hamiltonian, reference_start(s), 10.0, 1e-3)
    assert geodesic_residual(catalog_metric(spec), traj, mode="fd") <= 1e-6
    assert geodesic_residual(catalog_metric(spec), traj, mode="flow") <= 1e-12


def test_geodesic_residual_rejects_bad_input():
    traj = integrate(geodesic_hamiltonian(POLAR), PhasePoint([1.5, 0.2], [0.3, 0.8]), 0.1, 1e-2)
    with pytest.raises(ArgumentError):
        geodesic_residual(euclidean(3), traj)
    with pytest.raises(ArgumentError):
        geodesic_residual(POLAR, traj, mode="spline")


def test_killing_tensor_of_separable_integral():
    k = (1.0, 0.5, 0.25)
    s = build_system(SystemSpec("a", "Geodesic3D", k))
    x = 1.3
    K = extract_killing_tensor(s["K_a2"], [x, 0.8, 0.1])
    assert np.allclose(K, np.diag([1.0, 0.0, 0.5 * k[0] * x * x + k[1] / x**2]), atol=1e-14)


def test_metric_is_a_trivial_killing_tensor():
    spec = SystemSpec.default("d", "PDMGeodesic")
    s = build_system(spec)
    q = [1.1, 0.9, 0.0]
    twice = Observable("2T", lambda q, p: 2.0 * s.hamiltonian.fn(q, p), 3)
    assert np.allclose(extract_killing_tensor(twice, q), catalog_metric(spec).inverse(q), rtol=1e-13)


def test_linear_observable_is_not_a_tensor():
    with pytest.raises(DegreeError):
        extract_killing_tensor(coordinate_observable(2, 3, momentum=True), [1.0, 1.0, 0.0])
    mixed = Observable("mixed", lambda q, p: p[0] ** 2 + p[1], 3)
    with pytest.raises(DegreeError):
        killing_check(mixed, coordinate_observable(0, 3, True), [PhasePoint([1, 1, 0], [1, 1, 1])])


@pytest.mark.parametrize("family", "abcd")
def test_translation_along_lift_is_a_symmetry(family):
    s = build_system(SystemSpec.default(family, "Geodesic3D"))
    pz = coordinate_observable(2, 3, momentum=True)
    assert killing_check(pz, s.hamiltonian, sample_points(s, 20, 3)) == 0.0


def test_separable_integral_is_certified_and_plain_momentum_square_is_not():
    s = build_system(SystemSpec("a", "Geodesic3D", (1.0, 1.0, 1.0)))
    pts = sample_points(s, 20, 3)
    assert killing_check(s["K_a2"], s.hamiltonian, pts) <= 1e-10
    px2 = Observable("px2", lambda q, p: p[0] * p[0], 3)
    assert killing_check(px2, s.hamiltonian, pts) > 1e-3


@pytest.mark.parametrize("n,p,expected", [(3, 1, 6), (3, 2, 20), (2, 1, 3), (4, 1, 10)])
def test_killing_dimension(n, p, expected):
    assert killing_dimension(n, p) == expected


@pytest.mark.parametrize("n,p", [(0, 1), (3, 0), (2.5, 1)])
def test_killing_dimension_rejects_invalid(n, p):
    with pytest.raises(ArgumentError):
        killing_dimension(n, p)


@pytest.mark.parametrize("family", "abcd")
def test_catalog_metric_matches_independent_hamiltonian(family):
    spec = SystemSpec.default(family, "PDMGeodesic")
    T = geodesic_hamiltonian(catalog_metric(spec))
    s = build_system(spec)
    for z in sample_points(s, 10, 4):
        ref = oracles.geodesic_hamiltonian(family, z.q, z.p, spec.k, spec.lam)
        assert T(z) == pytest.approx(ref, rel=1e-14)


def test_metric_field_validates_shape():
    g = MetricField(2, lambda q: [[1.0, 0.0], [0.0, -1.0]], name="bad")
    assert not g.is_positive_definite([0.0, 0.0])

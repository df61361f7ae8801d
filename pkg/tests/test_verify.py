import json

import numpy as np
import pytest

from eisenlab.catalog import FAMILIES, SystemSpec, build_system
from eisenlab.errors import ArgumentError
from eisenlab.verify import (identity_checks, independence_rank, involution_matrix, lift_check,
                             limit_check, negative_controls, reduction_check, verify_system)

A111 = SystemSpec("a", "Geodesic3D", (1.0, 1.0, 1.0))


def test_declared_set_has_full_rank():
    res = independence_rank(A111, 200, 42)
    assert res["names"] == ["K_a1", "K_a2", "K_a3", "J_a2"]
    assert res["min_rank"] == 4 and res["passed"]


def test_energy_with_separated_parts_is_dependent():
    res = independence_rank(A111, 200, 42, ["K_a1", "K_a2", "K_a3", "H_a"], expected=3)
    assert res["max_rank"] == 3 and res["passed"]


def test_duplicate_does_not_raise_rank():
    res = independence_rank(A111, 50, 42, ["K_a1", "K_a2", "K_a2", "J_a2"], expected=3)
    assert res["max_rank"] == 3


def test_identity_residuals():
    checks = {c.name: c for c in identity_checks(A111, 100, 42)}
    assert checks["H_a = (K_a2 + K_a3)/2"].max_residual <= 1e-13
    pdm = {c.name: c for c in identity_checks(SystemSpec.default("d", "PDMGeodesic"))}
    assert pdm["K_d2 + K_d3 = 0"].passed


def test_rotation_is_not_a_symmetry_of_family_b():
    from eisenlab.core import Observable, PhasePoint, bracket_with_scale

    s = build_system(SystemSpec.default("b", "Geodesic3D"))
    L = Observable("L", lambda q, p: q[0] * p[1] - q[1] * p[0], 3)
    b, scale = bracket_with_scale(L, s.hamiltonian, PhasePoint([0.8, 1.1, 0.0], [0.3, -0.2, 0.5]))
    assert abs(b) > 1e-3 * scale


@pytest.mark.parametrize("family", FAMILIES)
def test_negative_controls_fire(family):
    for c in negative_controls(SystemSpec.default(family, "Potential3D")):
        assert c.passed and c.max_residual > 1e-7


def test_involution_table_shape_and_symmetry():
    table = involution_matrix(SystemSpec.default("c", "PDMPotential"), 50, 3)
    m = len(table.names)
    assert table.residuals.shape == (m, m)
    assert np.array_equal(table.residuals, table.residuals.T)
    assert table.passed
    assert "K_c1" in table.format()


def test_mutation_is_detected_by_brackets():
    table = involution_matrix(A111, 100, 42, mutation=("K_a2", "k2"))
    assert not table.passed


@pytest.mark.parametrize("family", FAMILIES)
def test_reduction_matches_planar_flow(family):
    res = reduction_check(family)
    assert res.distance <= 1e-8 and res.pz_drift <= 1e-11 and res.passed


def test_reduction_free_motion():
    res = reduction_check("a", k=(0.0, 0.0, 0.0), t_end=5.0)
    assert res.distance <= 1e-12


def test_reduction_bounded_coulomb_orbit():
    assert reduction_check("c", k=(-1.0, 0.1, 0.1)).distance <= 1e-8


def test_reduction_rejects_3d_start():
    from eisenlab.core import PhasePoint

    with pytest.raises(ArgumentError):
        reduction_check("a", z0_2d=PhasePoint([1, 1, 0], [0, 0, 0]))


def test_limits_of_full_tier():
    checks = limit_check(SystemSpec.default("a", "PDMPotential"))
    by = {c.name: c for c in checks}
    assert by["lambda=0: H_a"].max_residual == 0.0
    assert by["lambda=0: K_a2"].max_residual == 0.0
    assert by["lambda=0.1: J_a2"].max_residual <= 1e-13
    assert all(c.passed for c in checks)


def test_potential_limit_squares_the_momentum_integral():
    by = {c.name: c for c in limit_check(SystemSpec.default("b", "Potential3D"))}
    assert by["t=0,Z=0: K_b1"].passed


def test_limit_check_rejects_tiers_without_parameters():
    with pytest.raises(ArgumentError):
        limit_check(SystemSpec.default("a", "Geodesic3D"))


def test_lift_check_on_geodesic_tiers_only():
    assert lift_check(SystemSpec.default("c", "PDMGeodesic")).passed
    with pytest.raises(ArgumentError):
        lift_check(SystemSpec.default("c", "Potential3D"))


def test_report_is_deterministic_and_serialisable():
    spec = SystemSpec.default("d", "PDMPotential")
    a = verify_system(spec, flow=False)
    b = verify_system(spec, flow=False)
    assert a.to_json() == b.to_json()
    doc = json.loads(a.to_json())
    assert doc["overall"] is True
    kinds = {c["kind"] for c in doc["checks"]}
    assert {"involution", "identity", "independence", "limit"} <= kinds
    assert all(isinstance(c["max_residual"], str) for c in doc["checks"])


def test_report_with_flow_and_mutation_names_failures():
    report = verify_system(A111, flow=True, t_end=2.0, mutation=("K_a2", "k2"))
    assert not report.overall
    names = {c.name for c in report.failures}
    assert any("K_a2" in n for n in names)

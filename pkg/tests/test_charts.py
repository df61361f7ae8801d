import math

import numpy as np
import pytest

from eisenlab.charts import from_cartesian, symplectomorphism_check, to_cartesian
from eisenlab.core import PhasePoint
from eisenlab.errors import DomainError


def test_parabolic_point_and_momenta_to_cartesian():
    z = to_cartesian(PhasePoint([2.0, 1.0, 0.3], [2.0, -1.0, 0.7], "ParabolicCylI"))
    assert np.allclose(z.q, [1.5, 2.0, 0.3], atol=1e-15)
    assert np.allclose(z.p, [1.0, 0.0, 0.7], atol=1e-15)
    assert z.chart.id == "Cartesian3"


def test_parabolic_symmetry_point():
    z = to_cartesian(PhasePoint([1.0, 1.0, 0.0], [0.0, 0.0, 0.0], "ParabolicCylI"))
    assert np.allclose(z.q[:2], [0.0, 1.0], atol=1e-15)


def test_cylindrical_on_axis():
    z = to_cartesian(PhasePoint([2.0, 0.0, 0.0], [0.6, 0.0, 0.0], "Cylindrical"))
    assert np.allclose(z.q, [2.0, 0.0, 0.0]) and z.p[0] == pytest.approx(0.6)


def test_from_cartesian_to_parabolic():
    z = from_cartesian(PhasePoint([1.5, 2.0, 0.0], [1.0, 0.0, 0.0]), "ParabolicCylI")
    assert np.allclose(z.q[:2], [2.0, 1.0], atol=1e-15)
    assert np.allclose(z.p[:2], [2.0, -1.0], atol=1e-15)
    w = from_cartesian(PhasePoint([0.0, 1.0, 0.0], [0.0, 0.0, 0.0]), "ParabolicCylI")
    assert np.allclose(w.q[:2], [1.0, 1.0], atol=1e-15)


def test_branch_cut_is_excluded():
    with pytest.raises(DomainError):
        from_cartesian(PhasePoint([-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]), "ParabolicCylI")


def test_second_parabolic_chart_is_a_rotation_of_the_first():
    z = PhasePoint([0.9, -0.4, 0.2], [0.3, 0.8, -0.1])
    a = from_cartesian(z, "ParabolicCylII", margin=0.0)
    b = from_cartesian(z, "ParabolicCylI", margin=0.0)
    s = 1 / math.sqrt(2)
    assert b.q[0] == pytest.approx(s * (a.q[0] + a.q[1]), abs=1e-14)
    assert b.q[1] == pytest.approx(s * (a.q[0] - a.q[1]), abs=1e-14)


@pytest.mark.parametrize("chart", ["Cylindrical", "ParabolicCylI", "ParabolicCylII"])
def test_roundtrip(chart):
    z = PhasePoint([1.2, -0.7, 0.5], [0.4, 1.3, -0.8])
    back = to_cartesian(from_cartesian(z, chart, margin=0.0), margin=0.0)
    assert np.allclose(back.vector, z.vector, atol=1e-14)


def test_canonical_transformations():
    assert symplectomorphism_check("Cartesian3", PhasePoint([1.0, 2.0, 0.0], [0.1, 0.2, 0.3])) == 0
    assert symplectomorphism_check(
        "ParabolicCylI", PhasePoint([2.0, 1.0, 0.0], [0.3, -0.2, 0.1], "ParabolicCylI")) <= 1e-12
    assert symplectomorphism_check(
        "Cylindrical", PhasePoint([2.0, 1.0, 0.0], [0.3, -0.2, 0.1], "Cylindrical")) <= 1e-12


def test_margin_rejects_points_near_the_singular_set():
    with pytest.raises(DomainError):
        to_cartesian(PhasePoint([0.05, 1.0, 0.0], [0.0, 0.0, 0.0], "Cylindrical"), margin=0.1)

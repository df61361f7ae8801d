import math

import numpy as np
import pytest

from eisenlab.catalog import SystemSpec, build_system, reference_start
from eisenlab.core import Observable, PhasePoint
from eisenlab.dynamics import METHODS, drift_summary, integrate, monitor
from eisenlab.errors import ArgumentError, DomainError, UnknownObservable

import oracles

OSC = Observable("osc", lambda q, p: 0.5 * (p[0] * p[0] + q[0] * q[0]), 1, degree_in_p=2)
FREE = Observable("free", lambda q, p: 0.5 * p[0] * p[0], 1, degree_in_p=2)
A111 = SystemSpec("a", "Geodesic3D", (1.0, 1.0, 1.0))


def test_oscillator_returns_after_one_period():
    traj = integrate(OSC, PhasePoint([1.0], [0.0]), 2 * math.pi, 0.01)
    assert np.max(np.abs(traj.states_array[-1] - [1.0, 0.0])) <= 1e-4
    assert traj.times[-1] == pytest.approx(2 * math.pi, abs=1e-14)


@pytest.mark.parametrize("method", METHODS)
def test_free_particle_is_exact(method):
    traj = integrate(FREE, PhasePoint([0.0], [1.0]), 3.0, 0.1, method)
    assert traj.final.q[0] == pytest.approx(3.0, abs=1e-13)
    assert traj.final.p[0] == 1.0


@pytest.mark.parametrize("method,order", [("ImplicitMidpoint", 2), ("Gauss4", 4), ("RK4", 4)])
def test_convergence_order(method, order):
    def err(h):
        q, p = integrate(OSC, PhasePoint([1.0], [0.0]), 2.0, h, method).states_array[-1]
        qe, pe = oracles.oscillator(2.0)
        return math.hypot(q - qe, p - pe)

    ratio = err(0.1) / err(0.05)
    assert ratio == pytest.approx(2**order, rel=0.2)


@pytest.mark.parametrize("method", ["ImplicitMidpoint", "Gauss4"])
def test_lifted_flow_matches_reference_solver(method):
    k = (1.0, 1.0, 1.0)
    s = build_system(A111)
    z0 = reference_start(s)
    h = 1e-3 if method == "ImplicitMidpoint" else 1e-2
    traj = integrate(s.hamiltonian, z0, 2.0, h, method)
    ref = oracles.reference_flow(oracles.lifted_a_field(k), z0.vector, 2.0, traj.times)
    tol = 1e-5 if method == "ImplicitMidpoint" else 1e-8
    assert np.max(np.abs(traj.states_array - ref.y.T)) <= tol


def test_energy_and_integrals_drift_within_bounds():
    s = build_system(A111)
    traj = integrate(s.hamiltonian, reference_start(s), 10.0, 1e-3)
    monitor(traj, ["H_a", "K_a1", "J_a2"], system=s)
    assert traj.summary["H_a"]["relative_drift"] <= 1e-8
    assert traj.summary["K_a1"]["max_abs_drift"] <= 1e-12
    assert traj.summary["J_a2"]["relative_drift"] <= 1e-7


def test_midpoint_is_self_adjoint():
    s = build_system(SystemSpec.default("c", "PDMPotential"))
    z0 = reference_start(s)
    fwd = integrate(s.hamiltonian, z0, 3.0, 1e-3)
    back = integrate(s.hamiltonian, fwd.final, -3.0, 1e-3)
    assert back.times[-1] == pytest.approx(-3.0)
    assert np.max(np.abs(back.final.vector - z0.vector)) <= 1e-9


def test_chart_hamiltonian_flow_agrees_with_cartesian_flow():
    from eisenlab.charts import from_cartesian, to_cartesian

    s = build_system(SystemSpec.default("d", "Geodesic3D"))
    z0 = reference_start(s)
    cart = integrate(s.hamiltonian, z0, 1.0, 1e-3, "Gauss4")
    hc = s.chart_hamiltonians["ParabolicCylI"]
    par = integrate(hc, from_cartesian(z0, "ParabolicCylI"), 1.0, 1e-3, "Gauss4")
    assert np.allclose(to_cartesian(par.final).vector, cart.final.vector, atol=1e-10)


def test_non_integer_step_count_lands_on_end_time():
    traj = integrate(OSC, PhasePoint([1.0], [0.0]), 1.0, 0.3)
    assert len(traj) == 5
    assert traj.times[-1] == pytest.approx(1.0)
    assert integrate(OSC, PhasePoint([1.0], [0.0]), 0.0, 0.1).states_array.shape == (1, 2)


def test_start_outside_domain():
    s = build_system(SystemSpec("a", "PDMGeodesic", lam=0.5))
    with pytest.raises(DomainError, match="domain exit at t=0") as info:
        integrate(s.hamiltonian, PhasePoint([1.5, 1.0, 0.0], [0.1, 0.1, 0.1]), 1.0)
    assert info.value.time == 0.0


def test_domain_exit_carries_partial_trajectory():
    s = build_system(SystemSpec("a", "Geodesic3D", (1.0, 1.0, 1.0)))
    # head straight for the y axis, where the potential is singular
    z0 = PhasePoint([0.5, 1.0, 0.0], [-2.0, 0.0, 0.0])
    with pytest.raises(DomainError) as info:
        integrate(s.hamiltonian, z0, 5.0, 1e-3, margin=0.1)
    err = info.value
    assert 0.1 < err.time < 0.25
    part = err.trajectory
    assert len(part) >= 1 and np.all(part.states_array[:, 0] > 0.1)
    assert part.times[-1] < err.time


@pytest.mark.parametrize("kwargs", [
    {"h": 0.0}, {"h": -1e-3}, {"method": "Euler"}, {"t_end": math.inf},
])
def test_argument_validation(kwargs):
    args = {"t_end": 1.0, "h": 1e-2, "method": "ImplicitMidpoint"} | kwargs
    with pytest.raises(ArgumentError):
        integrate(OSC, PhasePoint([1.0], [0.0]), args["t_end"], args["h"], args["method"])


def test_dimension_mismatch_is_an_argument_error():
    with pytest.raises(ArgumentError):
        integrate(OSC, PhasePoint([1.0, 0.0], [0.0, 0.0]), 1.0)


def test_monitor_requires_a_system_for_names():
    traj = integrate(OSC, PhasePoint([1.0], [0.0]), 0.1, 0.01)
    with pytest.raises(UnknownObservable):
        monitor(traj, ["osc"])
    monitor(traj, [OSC])
    assert traj.summary["osc"]["initial"] == 0.5


def test_drift_summary_definition():
    out = drift_summary(np.array([2.0, 2.5, 1.0, 4.0]))
    assert out == {"max_abs_drift": 2.0, "relative_drift": 0.5, "initial": 2.0}

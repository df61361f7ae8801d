"""Symplectic time integration of Hamiltonian flows with invariant monitoring."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .charts import get_chart, to_cartesian_components
from .core import Observable, PhasePoint, vector_field_function
from .errors import (ArgumentError, ConvergenceError, DomainError, NonFiniteError,
                     UnknownObservable)
from .jets import Jet2

METHODS = ("ImplicitMidpoint", "Gauss4", "RK4")
SOLVER_TOL = 1e-13
SOLVER_MAXITER = 50

_SQ3 = math.sqrt(3.0)
_GAUSS_A = np.array([[0.25, 0.25 - _SQ3 / 6.0], [0.25 + _SQ3 / 6.0, 0.25]])


@dataclass(eq=False)
class Trajectory:
    """Uniformly sampled solution. ``states`` holds (q, p) rows in ``chart``."""

    times: np.ndarray
    states_array: np.ndarray
    chart: object
    method: str = "ImplicitMidpoint"
    monitors: dict[str, np.ndarray] = field(default_factory=dict)
    summary: dict[str, dict[str, float]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.states_array.shape[1] // 2

    @property
    def states(self) -> list[PhasePoint]:
        n = self.n
        return [PhasePoint(s[:n], s[n:], self.chart) for s in self.states_array]

    @property
    def final(self) -> PhasePoint:
        s = self.states_array[-1]
        return PhasePoint(s[: self.n], s[self.n:], self.chart)

    def __len__(self):
        return len(self.times)


def _hessian_fn(H: Observable, chart):
    n = H.ndof

    def hess(v):
        s = Jet2.seed(v)
        out = H.on_chart(chart, s[:n], s[n:])
        if not isinstance(out, Jet2):
            return np.zeros((2 * n, 2 * n))
        return np.asarray(out.hess)

    return hess


def _omega(n):
    return np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])


class _Stepper:
    def __init__(self, H: Observable, chart, method: str):
        self.f = vector_field_function(H, chart)
        self.hess = _hessian_fn(H, chart)
        self.n = H.ndof
        self.om = _omega(self.n)
        self.method = method
        self.k_prev = None
        self.k_prev2 = None
        self.newton_steps = 0

    def _predict(self, fallback):
        # linear extrapolation of the last two stage slopes
        if self.k_prev is None:
            return fallback()
        if self.k_prev2 is None:
            return self.k_prev
        return 2.0 * self.k_prev - self.k_prev2

    def _accept(self, k):
        self.k_prev2, self.k_prev = self.k_prev, k

    def step(self, z, h):
        if self.method == "RK4":
            return self._rk4(z, h)
        if self.method == "ImplicitMidpoint":
            return self._midpoint(z, h)
        return self._gauss4(z, h)

    def _rk4(self, z, h):
        f = self.f
        k1 = f(z)
        k2 = f(z + 0.5 * h * k1)
        k3 = f(z + 0.5 * h * k2)
        k4 = f(z + h * k3)
        return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def _midpoint(self, z, h):
        f = self.f
        k = self._predict(lambda: f(z))
        tol = SOLVER_TOL * max(1.0, float(np.max(np.abs(z))))
        last = math.inf
        for _ in range(SOLVER_MAXITER):
            k_new = f(z + 0.5 * h * k)
            delta = float(np.max(np.abs(k_new - k))) * abs(h)
            k = k_new
            if not np.all(np.isfinite(k)):
                break
            if _converged(delta, last, tol):
                self._accept(k)
                return z + h * k
            last = delta
        k = self._newton_midpoint(z, h, self._predict(lambda: f(z)), tol)
        self._accept(k)
        return z + h * k

    def _newton_midpoint(self, z, h, k, tol):
        f, eye = self.f, np.eye(2 * self.n)
        self.newton_steps += 1
        for _ in range(SOLVER_MAXITER):
            y = z + 0.5 * h * k
            r = k - f(y)
            jac = eye - 0.5 * h * (self.om @ self.hess(y))
            dk = np.linalg.solve(jac, -r)
            k = k + dk
            if not np.all(np.isfinite(k)):
                break
            if float(np.max(np.abs(dk))) * abs(h) <= tol:
                return k
        raise ConvergenceError("implicit midpoint solve did not converge")

    def _gauss4(self, z, h):
        f, A = self.f, _GAUSS_A
        K = self._predict(lambda: np.vstack([f(z), f(z)]))
        tol = SOLVER_TOL * max(1.0, float(np.max(np.abs(z))))
        last = math.inf
        for _ in range(SOLVER_MAXITER):
            K_new = np.vstack([f(z + h * (A[i, 0] * K[0] + A[i, 1] * K[1])) for i in range(2)])
            delta = float(np.max(np.abs(K_new - K))) * abs(h)
            K = K_new
            if not np.all(np.isfinite(K)):
                break
            if _converged(delta, last, tol):
                self._accept(K)
                return z + 0.5 * h * (K[0] + K[1])
            last = delta
        K = self._newton_gauss(z, h, self._predict(lambda: np.vstack([f(z), f(z)])), tol)
        self._accept(K)
        return z + 0.5 * h * (K[0] + K[1])

    def _newton_gauss(self, z, h, K, tol):
        f, A, m = self.f, _GAUSS_A, 2 * self.n
        self.newton_steps += 1
        for _ in range(SOLVER_MAXITER):
            Y = [z + h * (A[i, 0] * K[0] + A[i, 1] * K[1]) for i in range(2)]
            r = np.concatenate([K[i] - f(Y[i]) for i in range(2)])
            D = [self.om @ self.hess(Y[i]) for i in range(2)]
            jac = np.eye(2 * m)
            for i in range(2):
                for j in range(2):
                    jac[i * m:(i + 1) * m, j * m:(j + 1) * m] -= h * A[i, j] * D[i]
            dK = np.linalg.solve(jac, -r).reshape(2, m)
            K = K + dK
            if not np.all(np.isfinite(K)):
                break
            if float(np.max(np.abs(dK))) * abs(h) <= tol:
                return K
        raise ConvergenceError("Gauss-Legendre solve did not converge")


def _converged(delta, last, tol):
    # remaining error of a contracting iteration is about theta/(1-theta)*delta
    if delta <= tol:
        return True
    if not math.isfinite(last):
        return False
    theta = delta / last
    return theta < 0.5 and theta / (1.0 - theta) * delta <= tol


def _domain_checker(H: Observable, chart, margin: float):
    """Vectorised predicate over an (N, 2n) block of states."""
    n = H.ndof
    dom = H.domain

    def ok(S):
        S = np.atleast_2d(S)
        good = np.all(np.isfinite(S), axis=1)
        with np.errstate(all="ignore"):
            q = [S[:, i] for i in range(n)]
            good &= np.asarray(chart.in_domain(q), dtype=bool) | (chart.planar == "Cartesian")
            if dom is not None:
                if chart.planar != "Cartesian":
                    q, _ = to_cartesian_components(chart, q, [S[:, n + i] for i in range(n)])
                good &= np.asarray(dom(q, margin), dtype=bool)
        return good

    return ok


CHECK_BLOCK = 200


def integrate(H: Observable, z0: PhasePoint, t_end: float, h: float = 1e-3,
              method: str = "ImplicitMidpoint", margin: float = 0.0) -> Trajectory:
    """Integrate Hamilton's equations from ``z0`` for time ``t_end``.

    The run uses ceil(|t_end|/h) uniform steps of size t_end/N so that it
    finishes exactly at ``t_end``; a negative ``t_end`` integrates backward.
    Leaving the Hamiltonian's domain raises :class:`DomainError` carrying the
    exit time and the partial trajectory.
    """
    if method not in METHODS:
        raise ArgumentError(f"method must be one of {METHODS}, got {method!r}")
    if not (h > 0 and math.isfinite(h)):
        raise ArgumentError(f"step size must be positive, got {h}")
    if not math.isfinite(t_end):
        raise ArgumentError("t_end must be finite")
    if z0.n != H.ndof:
        raise ArgumentError(f"{H.name} has {H.ndof} degrees of freedom, z0 has {z0.n}")
    chart = get_chart(z0.chart)
    inside = _domain_checker(H, chart, margin)
    z = z0.vector.copy()
    if not inside(z)[0]:
        raise DomainError("domain exit at t=0", time=0.0)
    steps = max(1, math.ceil(abs(t_end) / h - 1e-9)) if t_end != 0 else 0
    dt = t_end / steps if steps else 0.0
    times = np.arange(steps + 1) * dt
    out = np.full((steps + 1, len(z)), np.nan)
    out[0] = z
    stepper = _Stepper(H, chart, method)
    i = 1
    with np.errstate(all="ignore"):
        # states are checked against the domain in blocks; the first bad row is the exit
        while i <= steps:
            stop = min(steps, i + CHECK_BLOCK - 1)
            failure = None
            for j in range(i, stop + 1):
                try:
                    z = stepper.step(z, dt)
                except (ConvergenceError, np.linalg.LinAlgError) as exc:
                    failure = (j, exc)
                    break
                out[j] = z
                if not math.isfinite(float(z.sum())):
                    failure = (j, None)
                    break
            last = failure[0] if failure else stop
            good = inside(out[i:last + 1])
            if not np.all(good):
                raise _exit(times, out, i + int(np.argmin(good)), chart, method)
            if failure is not None:
                j, exc = failure
                raise ConvergenceError(f"{exc} at t={times[j]:.6g}") from None
            i = stop + 1
    return Trajectory(times, out, chart, method)


def _exit(times, out, i, chart, method):
    partial = Trajectory(times[:i], out[:i].copy(), chart, method)
    return DomainError(f"domain exit at t={times[i]:.6g}", time=float(times[i]), trajectory=partial)


def _values_along(obs: Observable, traj: Trajectory) -> np.ndarray:
    n = traj.n
    S = traj.states_array
    chart = get_chart(traj.chart)
    if chart.planar == "Cartesian":
        Q, P = S[:, :n], S[:, n:]
    else:
        qc, pc = to_cartesian_components(chart, [S[:, i] for i in range(n)],
                                         [S[:, n + i] for i in range(n)])
        Q, P = np.column_stack(qc), np.column_stack(pc)
    with np.errstate(all="ignore"):
        v = obs.values(Q, P)
    if not np.all(np.isfinite(v)):
        raise NonFiniteError(f"{obs.name} not finite along the trajectory")
    return v


def drift_summary(values: np.ndarray) -> dict[str, float]:
    """max_abs_drift = max |F(t) - F(0)|; relative_drift divides by max |F(t)| (at least 1e-300)."""
    d = np.abs(values - values[0])
    mx = float(np.max(d))
    ref = float(np.max(np.abs(values)))
    return {"max_abs_drift": mx, "relative_drift": mx / max(ref, 1e-300), "initial": float(values[0])}


def monitor(traj: Trajectory, obs, system=None) -> Trajectory:
    """Record each observable along the trajectory plus drift summaries.

    ``obs`` may mix Observables and names; names are resolved through ``system``.
    """
    for o in obs:
        if isinstance(o, str):
            if system is None:
                raise UnknownObservable(f"cannot resolve {o!r} without a system")
            o = system[o]
        if not isinstance(o, Observable):
            raise UnknownObservable(f"{o!r} is not an observable")
        vals = _values_along(o, traj)
        traj.monitors[o.name] = vals
        traj.summary[o.name] = drift_summary(vals)
    return traj


__all__ = ["Trajectory", "integrate", "monitor", "drift_summary", "METHODS"]

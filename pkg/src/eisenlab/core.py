"""Phase-space points, observables and the canonical Poisson bracket.

Brackets are evaluated from first-order jets, so for every observable made of
elementary operations they are exact up to floating-point rounding. Second
derivatives (Jacobi identity, Newton Jacobians) come from :class:`Jet2`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .charts import Chart, cartesian_for, get_chart, to_cartesian_components
from .errors import DimensionMismatch, DomainError, NonFiniteError
from .jets import Dual, Jet, Jet2

ATOL = 1e-10
RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """A state (q, p) with n degrees of freedom, tagged with its chart."""

    q: np.ndarray
    p: np.ndarray
    chart: Chart = None

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        p = np.array(self.p, dtype=float).reshape(-1)
        chart = get_chart(self.chart) if self.chart is not None else cartesian_for(len(q))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "chart", chart)
        if len(q) != len(p):
            raise DimensionMismatch(f"q has {len(q)} entries, p has {len(p)}")
        if len(q) != chart.dim:
            raise DimensionMismatch(f"{chart.id} needs {chart.dim} coordinates, got {len(q)}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise NonFiniteError("phase point has non-finite entries")
        if not chart.in_domain(q):
            raise DomainError(f"q={q.tolist()} outside the open domain of {chart.id}")

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_vector(cls, v, chart=None):
        v = np.asarray(v, dtype=float)
        n = len(v) // 2
        return cls(v[:n], v[n:], chart)

    def __repr__(self):
        return f"PhasePoint(q={self.q.tolist()}, p={self.p.tolist()}, chart={self.chart.id})"


def _cartesian_q(z: PhasePoint) -> np.ndarray:
    if z.chart.planar == "Cartesian":
        return z.q
    q, _ = to_cartesian_components(z.chart, list(z.q), list(z.p))
    return np.array(q, dtype=float)


@dataclass(frozen=True, eq=False)
class Observable:
    """Named scalar phase-space function.

    ``fn(q, p)`` takes Cartesian canonical variables. ``native(q, p)``, when
    given, is the same function written in the variables of ``chart``.
    ``domain(q_cart, margin)`` returns a boolean (or boolean array).
    """

    name: str
    fn: Callable
    ndof: int
    degree_in_p: int | None = None
    chart: Chart | None = None
    native: Callable | None = None
    domain: Callable | None = None
    system: Any = field(default=None, repr=False)

    def __post_init__(self):
        chart = get_chart(self.chart) if self.chart is not None else cartesian_for(self.ndof)
        object.__setattr__(self, "chart", chart)

    def on_chart(self, chart, q, p):
        """Evaluate with (q, p) given in ``chart`` variables (scalars, arrays or jets)."""
        chart = get_chart(chart)
        if self.native is not None and chart.id == self.chart.id:
            return self.native(q, p)
        if chart.planar == "Cartesian":
            return self.fn(q, p)
        qc, pc = to_cartesian_components(chart, q, p)
        return self.fn(qc, pc)

    def check_domain(self, z: PhasePoint, margin: float = 0.0):
        if z.n != self.ndof:
            raise DimensionMismatch(f"{self.name} lives on {self.ndof} dof, point has {z.n}")
        if self.domain is not None and not bool(self.domain(_cartesian_q(z), margin)):
            raise DomainError(f"{z!r} outside the domain of {self.name}")

    def __call__(self, z: PhasePoint) -> float:
        self.check_domain(z)
        with np.errstate(all="ignore"):
            v = self.on_chart(z.chart, list(z.q), list(z.p))
        v = float(v.value if isinstance(v, (Jet, Jet2)) else v)
        if not np.isfinite(v):
            raise NonFiniteError(f"{self.name} is not finite at {z!r}")
        return v

    def values(self, Q, P):
        """Vectorised plain evaluation on Cartesian sample arrays of shape (N, n)."""
        Q, P = np.asarray(Q, float), np.asarray(P, float)
        with np.errstate(all="ignore"):
            v = self.fn([Q[:, i] for i in range(Q.shape[1])], [P[:, i] for i in range(P.shape[1])])
        return np.broadcast_to(np.asarray(v, dtype=float), (Q.shape[0],)).copy()


def _unit_seeds(z: PhasePoint) -> list[Jet]:
    eye = np.eye(2 * z.n)
    return [Jet(float(v), eye[i]) for i, v in enumerate(z.vector)]


def _jet_grad(out, m):
    if isinstance(out, Jet):
        return out.value, out.grad
    return out, np.zeros(m)


def value_and_grad(f: Observable, z: PhasePoint):
    """Value and (dF/dq, dF/dp) at ``z``, differentiated in z's own chart."""
    f.check_domain(z)
    s = _unit_seeds(z)
    n = z.n
    with np.errstate(all="ignore"):
        out = f.on_chart(z.chart, s[:n], s[n:])
    v, g = _jet_grad(out, 2 * n)
    v = float(v)
    g = np.array(g, dtype=float)
    if not (np.isfinite(v) and np.all(np.isfinite(g))):
        raise NonFiniteError(f"{f.name} or its gradient is not finite at {z!r}")
    return v, g


def grad_phase(f: Observable, z: PhasePoint) -> np.ndarray:
    return value_and_grad(f, z)[1]


def _symplectic_contract(gf, gg, n):
    return float(gf[:n] @ gg[n:] - gf[n:] @ gg[:n])


def poisson_bracket(f: Observable, g: Observable, z: PhasePoint) -> float:
    """Canonical bracket sum_i df/dq^i dg/dp_i - df/dp_i dg/dq^i."""
    if f.ndof != g.ndof:
        raise DimensionMismatch(f"{f.name} ({f.ndof} dof) vs {g.name} ({g.ndof} dof)")
    return _symplectic_contract(grad_phase(f, z), grad_phase(g, z), z.n)


def bracket_scale(gf, gg) -> float:
    """Magnitude the bracket is compared against: 1 + |grad f| |grad g|."""
    return 1.0 + float(np.linalg.norm(gf) * np.linalg.norm(gg))


def bracket_with_scale(f: Observable, g: Observable, z: PhasePoint):
    if f.ndof != g.ndof:
        raise DimensionMismatch(f"{f.name} ({f.ndof} dof) vs {g.name} ({g.ndof} dof)")
    gf, gg = grad_phase(f, z), grad_phase(g, z)
    return _symplectic_contract(gf, gg, z.n), bracket_scale(gf, gg)


def is_zero(residual, scale, atol=ATOL, rtol=RTOL) -> bool:
    return abs(residual) <= atol + rtol * scale


def hamiltonian_vector_field(H: Observable, z: PhasePoint) -> np.ndarray:
    """(qdot, pdot) = (dH/dp, -dH/dq) in the chart of ``z``."""
    g = grad_phase(H, z)
    n = z.n
    return np.concatenate([g[n:], -g[:n]])


def vector_field_function(H: Observable, chart=None) -> Callable[[np.ndarray], np.ndarray]:
    """Fast closure state-vector -> X_H for use inside integrators (no domain checks)."""
    chart = get_chart(chart) if chart is not None else cartesian_for(H.ndof)
    n = H.ndof
    m = 2 * n
    units = [tuple(1.0 if j == i else 0.0 for j in range(m)) for i in range(m)]
    on_chart = H.on_chart

    def field(v):
        s = [Dual(float(v[i]), units[i]) for i in range(m)]
        out = on_chart(chart, s[:n], s[n:])
        if not isinstance(out, Dual):
            return np.zeros(m)
        g = out.grad
        return np.array(g[n:] + tuple(-x for x in g[:n]))

    return field


# -- batch (vectorised over samples, Cartesian variables) ---------------------

def grad_batch(f: Observable, Q, P):
    """Values (N,) and gradients (N, 2n) at N Cartesian samples in one pass."""
    Q, P = np.asarray(Q, float), np.asarray(P, float)
    N, n = Q.shape
    seeds = Jet.seed([Q[:, i] for i in range(n)] + [P[:, i] for i in range(n)])
    with np.errstate(all="ignore"):
        out = f.fn(seeds[:n], seeds[n:])
    if isinstance(out, Jet):
        v = np.broadcast_to(out.value, (N,)).astype(float)
        g = np.broadcast_to(out.grad, (2 * n, N)).T.astype(float)
    else:
        v = np.broadcast_to(np.asarray(out, float), (N,)).copy()
        g = np.zeros((N, 2 * n))
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(g))):
        bad = int(np.argmax(~(np.isfinite(v) & np.all(np.isfinite(g), axis=1))))
        raise NonFiniteError(f"{f.name} not finite at sample {bad}: q={Q[bad]}, p={P[bad]}")
    return v, g


def bracket_batch(gf, gg):
    """Row-wise canonical brackets and scales from batch gradients (N, 2n)."""
    n = gf.shape[1] // 2
    b = np.einsum("ij,ij->i", gf[:, :n], gg[:, n:]) - np.einsum("ij,ij->i", gf[:, n:], gg[:, :n])
    scale = 1.0 + np.linalg.norm(gf, axis=1) * np.linalg.norm(gg, axis=1)
    return b, scale


# -- second order -------------------------------------------------------------

def hessian_phase(f: Observable, z: PhasePoint):
    """Value, gradient and Hessian over all 2n phase variables (exact, Jet2)."""
    f.check_domain(z)
    n = z.n
    s = Jet2.seed(z.vector)
    with np.errstate(all="ignore"):
        out = f.on_chart(z.chart, s[:n], s[n:])
    if not isinstance(out, Jet2):
        return float(out), np.zeros(2 * n), np.zeros((2 * n, 2 * n))
    if not (np.isfinite(out.value) and np.all(np.isfinite(out.hess))):
        raise NonFiniteError(f"{f.name} second derivatives not finite at {z!r}")
    return float(out.value), np.array(out.grad), np.array(out.hess)


def _omega(n):
    return np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])


def bracket_gradient(g: Observable, h: Observable, z: PhasePoint) -> np.ndarray:
    """Gradient of the function {g, h} over the 2n phase variables."""
    _, gg, Hg = hessian_phase(g, z)
    _, gh, Hh = hessian_phase(h, z)
    om = _omega(z.n)
    return Hg @ (om @ gh) + Hh @ (om.T @ gg)


def jacobi_residual(f: Observable, g: Observable, h: Observable, z: PhasePoint):
    """{f,{g,h}} + {g,{h,f}} + {h,{f,g}} and the magnitude of its terms."""
    n = z.n
    total, scale = 0.0, 1.0
    for a, b, c in ((f, g, h), (g, h, f), (h, f, g)):
        ga = grad_phase(a, z)
        gbc = bracket_gradient(b, c, z)
        total += _symplectic_contract(ga, gbc, n)
        scale += float(np.linalg.norm(ga) * np.linalg.norm(gbc))
    return total, scale


def coordinate_observable(index: int, ndof: int, momentum: bool = False, name=None) -> Observable:
    """The phase-space coordinate function q^i or p_i."""
    if momentum:
        fn = lambda q, p: p[index]  # noqa: E731
        label = name or f"p{index + 1}"
    else:
        fn = lambda q, p: q[index]  # noqa: E731
        label = name or f"q{index + 1}"
    return Observable(label, fn, ndof, degree_in_p=1 if momentum else 0)


__all__ = [
    "PhasePoint", "Observable", "grad_phase", "value_and_grad", "poisson_bracket",
    "bracket_with_scale", "bracket_scale", "is_zero", "hamiltonian_vector_field",
    "vector_field_function", "grad_batch", "bracket_batch", "hessian_phase",
    "bracket_gradient", "jacobi_residual", "coordinate_observable", "ATOL", "RTOL",
]

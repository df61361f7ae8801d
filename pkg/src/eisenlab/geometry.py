"""Riemannian side: metrics, the Eisenhart lift, connection, curvature, Killing tensors."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

import numpy as np

from .core import Observable, PhasePoint, bracket_with_scale
from .errors import ArgumentError, DegreeError, DomainError, SingularMetric
from .jets import Jet, Jet2, value_of


def jet_inverse(m: Sequence[Sequence]) -> list[list]:
    """Inverse of a small matrix whose entries may be floats or jets.

    Gauss-Jordan with partial pivoting on the entry values; derivatives flow
    through the elementary operations.
    """
    n = len(m)
    a = [list(row) + [1.0 if i == j else 0.0 for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(float(value_of(a[r][col]))))
        if float(value_of(a[piv][col])) == 0.0:
            raise SingularMetric("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv_p = 1.0 / a[col][col]
        a[col] = [v * inv_p for v in a[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if isinstance(f, (Jet, Jet2)) or f != 0.0:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _float_matrix(rows) -> np.ndarray:
    return np.array([[float(value_of(v)) for v in row] for row in rows])


@dataclass(frozen=True, eq=False)
class MetricField:
    """Symmetric metric g_ij(q) given by a jet-compatible component function.

    ``components(q)`` returns an n x n nested list; entries may be plain
    numbers. ``domain(q)``, when given, must hold wherever g is evaluated.
    """

    dim: int
    components: Callable
    name: str = "g"
    domain: Callable | None = None

    def _check(self, q):
        q = np.asarray(q, dtype=float)
        if q.shape != (self.dim,):
            raise ArgumentError(f"{self.name} expects {self.dim} coordinates, got shape {q.shape}")
        if self.domain is not None and not bool(self.domain(q)):
            raise DomainError(f"q={q.tolist()} outside the domain of {self.name}")
        return q

    def matrix(self, q) -> np.ndarray:
        q = self._check(q)
        with np.errstate(all="ignore"):
            g = _float_matrix(self.components(list(q)))
        if not np.all(np.isfinite(g)):
            raise SingularMetric(f"{self.name} not finite at q={q.tolist()}")
        return g

    def inverse(self, q) -> np.ndarray:
        g = self.matrix(q)
        try:
            return np.linalg.solve(g, np.eye(self.dim))
        except np.linalg.LinAlgError:
            raise SingularMetric(f"{self.name} singular at q={list(q)}") from None

    def is_positive_definite(self, q) -> bool:
        return bool(np.all(np.linalg.eigvalsh(self.matrix(q)) > 0.0))

    def derivatives(self, q):
        """g, dg[i, j, k] = d_k g_ij and d2g[i, j, k, l] = d_k d_l g_ij (exact)."""
        q = self._check(q)
        n = self.dim
        seeds = Jet2.seed(q)
        with np.errstate(all="ignore"):
            rows = self.components(seeds)
        g = np.zeros((n, n))
        dg = np.zeros((n, n, n))
        d2g = np.zeros((n, n, n, n))
        for i in range(n):
            for j in range(n):
                e = rows[i][j]
                if isinstance(e, Jet2):
                    g[i, j], dg[i, j], d2g[i, j] = e.value, e.grad, e.hess
                else:
                    g[i, j] = float(e)
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(dg)) and np.all(np.isfinite(d2g))):
            raise SingularMetric(f"{self.name} derivatives not finite at q={q.tolist()}")
        return g, dg, d2g


def euclidean(n: int) -> MetricField:
    def comps(q):
        return [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]

    return MetricField(n, comps, name=f"euclidean{n}")


def diagonal_metric(n: int, diag: Callable, name="g", domain=None) -> MetricField:
    """Metric from a function returning the n diagonal entries."""
    def comps(q):
        d = diag(q)
        return [[d[i] if i == j else 0.0 for j in range(n)] for i in range(n)]

    return MetricField(n, comps, name=name, domain=domain)


def geodesic_hamiltonian(g: MetricField, name: str = "T") -> Observable:
    """T = 1/2 g^ij p_i p_j as an observable in the metric's own coordinates."""
    n = g.dim

    def T(q, p):
        ginv = jet_inverse(g.components(q))
        out = 0.0
        for i in range(n):
            for j in range(n):
                out = out + ginv[i][j] * p[i] * p[j]
        return 0.5 * out

    domain = None
    if g.domain is not None:
        domain = lambda q, margin=0.0: g.domain(np.asarray(q, float))  # noqa: E731
    return Observable(name, T, n, degree_in_p=2, domain=domain)


def eisenhart_lift(g2: MetricField, V: Callable, name: str = "T"):
    """Lift (g2, V) to the metric g2 + dz^2/V and its geodesic Hamiltonian.

    Returns ``(metric3, T)`` with T = 1/2 g2^ij p_i p_j + 1/2 V p_z^2. Points
    where V <= 0 raise :class:`DomainError`.
    """
    n = g2.dim

    def positive(q):
        v = float(value_of(V(list(q[:n]))))
        return v > 0.0 and (g2.domain is None or bool(g2.domain(q[:n])))

    def comps(q):
        base = g2.components(q[:n])
        v = V(q[:n])
        if float(value_of(v)) <= 0.0:
            raise DomainError(f"lift requires V > 0, got V={float(value_of(v))}")
        rows = [list(base[i]) + [0.0] for i in range(n)]
        rows.append([0.0] * n + [1.0 / v])
        return rows

    metric3 = MetricField(n + 1, comps, name=f"lift({g2.name})", domain=positive)

    def T(q, p):
        ginv = jet_inverse(g2.components(q[:n]))
        out = 0.0
        for i in range(n):
            for j in range(n):
                out = out + ginv[i][j] * p[i] * p[j]
        return 0.5 * (out + V(q[:n]) * p[n] * p[n])

    def domain(q, margin=0.0):
        q = np.asarray(q, float)
        if q.ndim > 1:
            return np.array([positive(col) for col in q.T])
        return positive(q)

    return metric3, Observable(name, T, n + 1, degree_in_p=2, domain=domain)


def christoffel(g: MetricField, q) -> np.ndarray:
    """Gamma[i, j, k] = 1/2 g^il (d_k g_lj + d_j g_lk - d_l g_jk)."""
    gm, dg, _ = g.derivatives(q)
    return _christoffel_from(gm, dg)


def _christoffel_from(gm, dg):
    try:
        ginv = np.linalg.solve(gm, np.eye(len(gm)))
    except np.linalg.LinAlgError:
        raise SingularMetric("metric is singular") from None
    # S[l, j, k] = d_k g_lj + d_j g_lk - d_l g_jk
    S = dg + np.transpose(dg, (0, 2, 1)) - np.transpose(dg, (2, 0, 1))
    gam = 0.5 * np.einsum("il,ljk->ijk", ginv, S)
    return 0.5 * (gam + np.transpose(gam, (0, 2, 1)))


def _christoffel_and_derivative(g: MetricField, q):
    gm, dg, d2g = g.derivatives(q)
    n = len(gm)
    try:
        ginv = np.linalg.solve(gm, np.eye(n))
    except np.linalg.LinAlgError:
        raise SingularMetric("metric is singular") from None
    S = dg + np.transpose(dg, (0, 2, 1)) - np.transpose(dg, (2, 0, 1))
    # dS[l, j, k, m] = d_m S[l, j, k]
    dS = d2g + np.transpose(d2g, (0, 2, 1, 3)) - np.transpose(d2g, (2, 0, 1, 3))
    dginv = -np.einsum("ia,abm,bl->ilm", ginv, dg, ginv)
    gam = 0.5 * np.einsum("il,ljk->ijk", ginv, S)
    dgam = 0.5 * (np.einsum("ilm,ljk->ijkm", dginv, S) + np.einsum("il,ljkm->ijkm", ginv, dS))
    return ginv, gam, dgam


def scalar_curvature_probe(g: MetricField, q) -> float:
    """Ricci scalar at q from exact second derivatives of the metric."""
    ginv, gam, dgam = _christoffel_and_derivative(g, q)
    # R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj}
    riem = (np.einsum("iljk->ijkl", dgam) - np.einsum("ikjl->ijkl", dgam)
            + np.einsum("ikm,mlj->ijkl", gam, gam) - np.einsum("ilm,mkj->ijkl", gam, gam))
    ricci = np.einsum("ijil->jl", riem)
    return float(np.einsum("jl,jl->", ginv, ricci))


def _velocity_jets(g: MetricField, z_vec, direction):
    n = g.dim
    s = Jet.directional(z_vec, direction)
    ginv = jet_inverse(g.components(s[:n]))
    return [sum((ginv[i][j] * s[n + j] for j in range(n)), 0.0) for i in range(n)]


def geodesic_residual(g: MetricField, traj, mode: str = "flow", max_points: int = 200) -> float:
    """max |qddot + Gamma(qdot, qdot)| along a geodesic-flow trajectory.

    qdot = g^{-1} p. In ``"flow"`` mode qddot is the exact derivative of
    g^{-1}(q) p along the Hamiltonian vector field of 1/2 g^ij p_i p_j; in
    ``"fd"`` mode it is a central difference of qdot between stored states.
    """
    T = geodesic_hamiltonian(g)
    states = np.asarray(traj.states_array if hasattr(traj, "states_array") else traj, float)
    n = g.dim
    if states.shape[1] != 2 * n:
        raise ArgumentError(f"trajectory has {states.shape[1]} phase variables, metric needs {2 * n}")
    worst = 0.0
    if mode == "flow":
        idx = np.unique(np.linspace(0, len(states) - 1, min(max_points, len(states))).astype(int))
        eye = np.eye(2 * n)
        for k in idx:
            v = states[k]
            seeds = [Jet(float(v[i]), eye[i]) for i in range(2 * n)]
            out = T.fn(seeds[:n], seeds[n:])
            xh = np.concatenate([out.grad[n:], -out.grad[:n]])
            qd = _velocity_jets(g, v, xh)
            qdot = np.array([float(value_of(e)) for e in qd])
            qddot = np.array([float(e.grad[0]) if isinstance(e, Jet) else 0.0 for e in qd])
            gam = christoffel(g, v[:n])
            res = qddot + np.einsum("ijk,j,k->i", gam, qdot, qdot)
            worst = max(worst, float(np.max(np.abs(res))))
        return worst
    if mode != "fd":
        raise ArgumentError(f"unknown geodesic residual mode {mode!r}")
    times = np.asarray(traj.times, float)
    vel = np.array([g.inverse(s[:n]) @ s[n:] for s in states])
    idx = np.unique(np.linspace(1, len(states) - 2, min(max_points, len(states) - 2)).astype(int))
    for k in idx:
        acc = (vel[k + 1] - vel[k - 1]) / (times[k + 1] - times[k - 1])
        gam = christoffel(g, states[k, :n])
        res = acc + np.einsum("ijk,j,k->i", gam, vel[k], vel[k])
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def _as_point(q, p=None, n=None):
    if isinstance(q, PhasePoint):
        return q
    q = np.asarray(q, float)
    return PhasePoint(q, np.zeros_like(q) if p is None else p)


PROBE_MOMENTUM = (0.7, -1.3, 0.9, 0.4, -0.6, 1.1)


def homogeneity_degree(F: Observable, z: PhasePoint, tol: float = 1e-10):
    """Return 1 or 2 if F(q, s p) = s^deg F(q, p) at the probe, else None."""
    p = np.array(PROBE_MOMENTUM[: z.n])
    s = 2.0
    a = F.on_chart(z.chart, list(z.q), list(p))
    b = F.on_chart(z.chart, list(z.q), list(s * p))
    a, b = float(value_of(a)), float(value_of(b))
    for deg in (2, 1):
        if abs(b - s ** deg * a) <= tol * (1.0 + abs(b)):
            return deg
    return None


def extract_killing_tensor(F: Observable, q) -> np.ndarray:
    """K^ij(q) = 1/2 d^2F/dp_i dp_j at p = 0 for F homogeneous quadratic in p."""
    z = _as_point(q)
    if homogeneity_degree(F, z) != 2:
        raise DegreeError(f"{F.name} is not homogeneous quadratic in the momenta")
    F.check_domain(z)
    n = z.n
    s = Jet2.seed(list(z.q) + [0.0] * n)
    out = F.on_chart(z.chart, s[:n], s[n:])
    if not isinstance(out, Jet2):
        return np.zeros((n, n))
    K = 0.5 * np.array(out.hess)[n:, n:]
    return 0.5 * (K + K.T)


def killing_check(F: Observable, T: Observable, samples) -> float:
    """max over samples of |{F, 2T}| / (1 + |dF| |d(2T)|).

    F must be homogeneous of degree one (Killing vector) or two (Killing
    tensor) in the momenta; anything else raises :class:`DegreeError`.
    """
    pts = list(samples)
    if not pts:
        return 0.0
    if homogeneity_degree(F, pts[0]) is None:
        raise DegreeError(f"{F.name} is not homogeneous in the momenta")
    worst = 0.0
    for z in pts:
        b, scale = bracket_with_scale(F, T, z)
        worst = max(worst, 2.0 * abs(b) / (1.0 + 2.0 * (scale - 1.0)))
    return worst


def killing_dimension(n: int, p: int) -> int:
    """Dimension of valence-p Killing tensors on an n-dimensional constant-curvature space."""
    if int(n) != n or int(p) != p or n < 1 or p < 1:
        raise ArgumentError(f"need integers n >= 1 and p >= 1, got n={n}, p={p}")
    n, p = int(n), int(p)
    num = comb(n + p, p + 1) * comb(n + p - 1, p)
    if num % n:
        raise ArgumentError("formula did not produce an integer")  # never for valid input
    return num // n


# -- catalog metrics --------------------------------------------------------------

def catalog_potential(spec) -> Callable:
    """V of the spec's family on Cartesian (x, y) with the spec's k coefficients."""
    from .catalog.families import FAMILY_DEFS

    V = FAMILY_DEFS[spec.family].potential("Cartesian")
    k1, k2, k3 = spec.k
    return lambda q: V(q[0], q[1], k1, k2, k3)


def catalog_metric(spec) -> MetricField:
    """Kinetic metric of a 3D catalog system: mu (dx^2 + dy^2 + dz^2/V)."""
    from .catalog.families import FAMILY_DEFS

    if spec.ndof != 3:
        raise ArgumentError("catalog metrics exist for 3D tiers only")
    fdef = FAMILY_DEFS[spec.family]
    V = catalog_potential(spec)
    lam = spec.lam

    def diag(q):
        mu = fdef.mass("Cartesian", q[0], q[1], lam)
        return [mu, mu, mu / V(q)]

    def domain(q):
        q = np.asarray(q, float)
        return bool(fdef.domain(q[0], q[1], 0.0)) and float(V(q)) > 0.0 and \
            float(fdef.mass("Cartesian", q[0], q[1], lam)) > 0.0

    return diagonal_metric(3, diag, name=f"g_{spec.family}", domain=domain)


__all__ = [
    "MetricField", "euclidean", "diagonal_metric", "geodesic_hamiltonian", "eisenhart_lift",
    "christoffel", "scalar_curvature_probe", "geodesic_residual", "extract_killing_tensor",
    "killing_check", "killing_dimension", "homogeneity_degree", "catalog_metric",
    "catalog_potential", "jet_inverse",
]

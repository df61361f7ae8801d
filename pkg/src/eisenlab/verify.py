"""Executable checks of the catalog's claims, assembled into reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import (DEFAULT_SAMPLES, DEFAULT_SEED, PDM_TIERS, POTENTIAL_TIERS, BracketRelation,
                      SystemSpec, ZProfile, build_system, reference_start, sample_cartesian)
from .catalog.spec import DEFAULT_K
from .catalog.system import System
from .core import PhasePoint, bracket_batch, grad_batch
from .dynamics import integrate, monitor
from .errors import ArgumentError, DomainError, SpecError

BRACKET_TOL = 1e-10
IDENTITY_TOL = 1e-12
LIMIT_TOL = 1e-13
CONTINUITY_TOL = 1e-5
CONTINUITY_LAMBDA = 1e-6
LIFT_TOL = 1e-14
DRIFT_TOL = 1e-7
LINEAR_DRIFT_TOL = 1e-11
REDUCTION_TOL = 1e-8
RANK_CUTOFF = 1e-8

# integrals whose PDM form does not depend on lambda at all
LAMBDA_FREE = {"a": ("J_a2",), "c": ("K_c1", "K_c2")}

# 2D starts for the reduction check: (k, q, p)
REDUCTION_STARTS = {
    "a": ((1.0, 1.0, 1.0), (1.0, 1.0), (0.2, -0.3)),
    "b": (DEFAULT_K, (0.3, 1.1), (0.1, 0.1)),
    "c": ((-1.0, 0.1, 0.1), (1.0, 1.2), (0.3, 0.2)),
    "d": (DEFAULT_K, (1.5, 2.0), (0.2, 0.15)),
}


@dataclass
class Check:
    name: str
    kind: str
    max_residual: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind,
                "max_residual": _fmt(self.max_residual), "tolerance": _fmt(self.tolerance),
                "pass": bool(self.passed)}


def _fmt(x: float) -> str:
    # 17 significant digits round-trips every double
    return f"{float(x):.16e}"


@dataclass
class VerificationReport:
    system: SystemSpec
    seed: int
    samples: int
    checks: list[Check] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"system": self.system.to_dict(), "seed": self.seed, "samples": self.samples,
                "checks": [c.to_dict() for c in self.checks], "overall": self.overall}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _system(spec_or_system, mutation=None) -> System:
    if isinstance(spec_or_system, System):
        return spec_or_system
    if not isinstance(spec_or_system, SystemSpec):
        raise SpecError("expected a SystemSpec or built System")
    return build_system(spec_or_system, mutation)


def _values_and_grads(system: System, names, Q, P):
    cache = {}
    for n in names:
        if n not in cache:
            cache[n] = grad_batch(system[n], Q, P)
    return cache


# -- brackets and relations ----------------------------------------------------

def relation_residual(rel: BracketRelation, cache) -> float:
    """Worst normalised residual of one relation over the sampled points.

    Brackets are divided by 1 + |grad F||grad G|; sum identities by one plus
    the magnitudes of the terms involved.
    """
    if rel.kind in ("zero", "nonzero"):
        b, scale = bracket_batch(cache[rel.lhs][1], cache[rel.rhs][1])
        return float(np.max(np.abs(b) / scale))
    a, b = cache[rel.lhs][0], cache[rel.rhs][0]
    if rel.kind == "sum_zero":
        return float(np.max(np.abs(a + b) / (1.0 + np.abs(a) + np.abs(b))))
    t = cache[rel.target][0]
    both = a + b if rel.kind == "sum_equals" else 0.5 * (a + b)
    return float(np.max(np.abs(t - both) / (1.0 + np.abs(t) + np.abs(a) + np.abs(b))))


@dataclass
class InvolutionMatrix:
    names: list[str]
    residuals: np.ndarray
    declared: list[tuple[BracketRelation, float, bool]]

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.declared)

    def format(self) -> str:
        w = max(len(n) for n in self.names) + 2
        lines = [" " * w + "".join(f"{n:>{w + 8}}" for n in self.names)]
        for i, n in enumerate(self.names):
            lines.append(f"{n:<{w}}" + "".join(f"{self.residuals[i, j]:>{w + 8}.2e}"
                                                for j in range(len(self.names))))
        lines.append("")
        for rel, res, ok in self.declared:
            lines.append(f"{'ok  ' if ok else 'FAIL'} {rel}  residual {res:.3e}")
        return "\n".join(lines)


def involution_matrix(spec, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                      mutation=None) -> InvolutionMatrix:
    """All pairwise bracket residuals among the system's observables.

    Only the declared zero relations carry a pass flag; other entries are
    informational.
    """
    system = _system(spec, mutation)
    Q, P = sample_cartesian(system, samples, seed)
    names = list(system.observables)
    cache = _values_and_grads(system, names, Q, P)
    m = len(names)
    R = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            b, scale = bracket_batch(cache[names[i]][1], cache[names[j]][1])
            R[i, j] = R[j, i] = float(np.max(np.abs(b) / scale))
    declared = []
    for rel in system.relations:
        if rel.kind == "zero":
            res = relation_residual(rel, cache)
            declared.append((rel, res, res <= BRACKET_TOL))
    return InvolutionMatrix(names, R, declared)


def independence_rank(spec, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                      names=None, expected: int | None = None) -> dict:
    """Numerical rank of the Jacobian of ``names`` (default: declared set) per sample.

    A singular value counts when it is at least 1e-8 of the largest. The set
    passes when all but at most one sample in 200 reach ``expected``.
    """
    system = _system(spec)
    if names is None:
        names = [o.name for o in system.integrals]
    if expected is None:
        expected = len(names)
    Q, P = sample_cartesian(system, samples, seed)
    cache = _values_and_grads(system, names, Q, P)
    J = np.stack([cache[n][1] for n in names], axis=1)  # (N, m, 2n)
    sv = np.linalg.svd(J, compute_uv=False)
    ranks = np.sum(sv >= RANK_CUTOFF * sv[:, :1], axis=1)
    hits = int(np.sum(ranks == expected))
    allowed = samples // 200
    return {"names": list(names), "expected": expected, "min_rank": int(ranks.min()),
            "max_rank": int(ranks.max()), "ranks": ranks, "hits": hits,
            "passed": hits >= samples - allowed}


def identity_checks(spec, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                    mutation=None) -> list[Check]:
    """Sum identities, alternative closed forms and chart-native Hamiltonians."""
    system = _system(spec, mutation)
    Q, P = sample_cartesian(system, samples, seed)
    obs = system.observables
    checks = []
    sums = [r for r in system.relations if r.kind in ("sum_zero", "half_sum_equals", "sum_equals")]
    cache = _values_and_grads(system, {n for r in sums for n in r.names}, Q, P)
    for rel in sums:
        res = relation_residual(rel, cache)
        checks.append(Check(str(rel), "identity", res, IDENTITY_TOL, res <= IDENTITY_TOL))
    for name in obs:
        if "[" not in name:
            continue
        base = name.split("[")[0]
        a, b = obs[name].values(Q, P), obs[base].values(Q, P)
        res = float(np.max(np.abs(a - b) / (1.0 + np.abs(a) + np.abs(b))))
        checks.append(Check(f"{name} = {base}", "alternative_form", res, IDENTITY_TOL,
                            res <= IDENTITY_TOL))
    h = system.hamiltonian.values(Q, P)
    for cid, hc in system.chart_hamiltonians.items():
        ok = np.asarray(hc.chart.in_image(Q.T, 0.0), dtype=bool)
        if not ok.any():
            continue
        vals = np.array([_native_value(hc, q, p) for q, p in zip(Q[ok], P[ok])])
        res = float(np.max(np.abs(vals - h[ok]) / (1.0 + np.abs(h[ok]))))
        checks.append(Check(f"{hc.name} = {system.hamiltonian.name}", "chart", res,
                            IDENTITY_TOL, res <= IDENTITY_TOL))
    return checks


def _native_value(obs, q, p) -> float:
    from .charts import from_cartesian

    z = from_cartesian(PhasePoint(q, p), obs.chart, margin=0.0)
    return float(obs.native(list(z.q), list(z.p)))


def negative_controls(spec, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                      mutation=None) -> list[Check]:
    """Pairs known not to commute must show a clearly nonzero bracket."""
    system = _system(spec, mutation)
    Q, P = sample_cartesian(system, samples, seed)
    out = []
    for rel in system.relations:
        if rel.kind != "nonzero":
            continue
        res = relation_residual(rel, _values_and_grads(system, rel.names, Q, P))
        out.append(Check(str(rel), "negative_control", res, BRACKET_TOL, res > 1e3 * BRACKET_TOL))
    return out


# -- flows ---------------------------------------------------------------------

def conservation_check(spec, h: float = 1e-3, t_end: float = 10.0, z0: PhasePoint | None = None,
                       method: str = "ImplicitMidpoint", mutation=None, seed: int = DEFAULT_SEED):
    """Integrate the system's own flow and measure the drift of every integral.

    Returns ``(checks, trajectory)``. Linear integrals (p_z type) are held to
    1e-11, everything else to a relative drift of 1e-7.
    """
    system = _system(spec, mutation)
    if z0 is None:
        z0 = reference_start(system, seed)
    traj = monitor(integrate(system.hamiltonian, z0, t_end, h, method), system.conserved)
    checks = []
    for name, s in traj.summary.items():
        linear = name in system.linear_integrals
        tol = LINEAR_DRIFT_TOL if linear else DRIFT_TOL
        checks.append(Check(f"drift {name}", "conservation", s["relative_drift"], tol,
                            s["relative_drift"] <= tol))
    return checks, traj


@dataclass
class ReductionResult:
    family: str
    distance: float
    pz_drift: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.distance <= self.tolerance and self.pz_drift <= LINEAR_DRIFT_TOL


def reduction_check(family: str, k=None, z0_2d: PhasePoint | None = None, t_end: float = 5.0,
                    h: float = 1e-3, method: str = "ImplicitMidpoint") -> ReductionResult:
    """Sup distance in (x, y, p_x, p_y) between the 2D flow and the lifted
    geodesic flow started at z = 0 with p_z = sqrt(2)."""
    k0, q0, p0 = REDUCTION_STARTS[family]
    k = tuple(k0 if k is None else k)
    if z0_2d is None:
        z0_2d = PhasePoint(q0, p0)
    if z0_2d.n != 2:
        raise ArgumentError("reduction_check needs a 2D start")
    base = build_system(SystemSpec(family, "Euclidean2D", k))
    lifted = build_system(SystemSpec(family, "Geodesic3D", k))
    if not bool(base.in_domain(z0_2d.q, 0.0)):
        raise DomainError("reduction start outside the 2D domain", time=0.0)
    pz = math.sqrt(2.0)
    z3 = PhasePoint([*z0_2d.q, 0.0], [*z0_2d.p, pz])
    flat = integrate(base.hamiltonian, z0_2d, t_end, h, method).states_array
    geo = integrate(lifted.hamiltonian, z3, t_end, h, method).states_array
    proj = geo[:, [0, 1, 3, 4]]
    dist = float(np.max(np.abs(proj - flat)))
    return ReductionResult(family, dist, float(np.max(np.abs(geo[:, 5] - pz))), REDUCTION_TOL)


# -- parameter limits ----------------------------------------------------------

def _lower_tier(spec: SystemSpec) -> SystemSpec:
    tier = "Potential3D" if spec.tier == "PDMPotential" else "Geodesic3D"
    return SystemSpec(spec.family, tier, spec.k, spec.t, 0.0, spec.zfun)


def _compare(a: System, b: System, names, Q, P, kind, tol, label, square=()) -> list[Check]:
    out = []
    for name in names:
        va = a[name].values(Q, P)
        vb = b[name].values(Q, P)
        if name in square:
            vb = vb * vb
        res = float(np.max(np.abs(va - vb) / (1.0 + np.abs(va) + np.abs(vb))))
        out.append(Check(f"{label}: {name}", kind, res, tol, res <= tol))
    return out


def limit_check(spec: SystemSpec, samples: int = DEFAULT_SAMPLES,
                seed: int = DEFAULT_SEED) -> list[Check]:
    """Reductions to lower tiers.

    For a PDM tier: lambda = 0 against the tier without mass, continuity at
    lambda = 1e-6, and lambda-independence of the integrals that do not see
    the mass. For Potential3D: t = 0, Z = 0 against Geodesic3D, where the
    first integral becomes the square of p_z.
    """
    if spec.tier not in PDM_TIERS and spec.tier != "Potential3D":
        raise ArgumentError(f"no parameter limit defined for tier {spec.tier}")
    checks = []
    if spec.tier == "Potential3D":
        flat = spec.with_(t=(0.0, 0.0, 0.0), zfun=ZProfile.zero())
        a, b = build_system(flat), build_system(SystemSpec(spec.family, "Geodesic3D", spec.k))
        Q, P = sample_cartesian(a, samples, seed)
        names = [n for n in a.observables if n in b.observables]
        return _compare(a, b, names, Q, P, "limit", LIMIT_TOL, "t=0,Z=0",
                        square=(f"K_{spec.family}1",))
    zero = build_system(spec.with_(lam=0.0))
    lower = build_system(_lower_tier(spec))
    Q, P = sample_cartesian(zero, samples, seed)
    names = [n for n in zero.observables if n in lower.observables]
    checks += _compare(zero, lower, names, Q, P, "limit", LIMIT_TOL, "lambda=0")
    near = build_system(spec.with_(lam=CONTINUITY_LAMBDA))
    checks += _compare(near, zero, [zero.hamiltonian.name], Q, P, "continuity", CONTINUITY_TOL,
                       f"lambda={CONTINUITY_LAMBDA:g}")
    full = build_system(spec)
    Qf, Pf = sample_cartesian(full, samples, seed)
    free = (f"K_{spec.family}1",) + LAMBDA_FREE.get(spec.family, ())
    checks += _compare(full, lower, [n for n in free if n in full.observables], Qf, Pf,
                       "lambda_free", LIMIT_TOL, f"lambda={spec.lam:g}")
    return checks


def lift_check(spec, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> Check:
    """Geodesic Hamiltonian of the catalog metric against the catalog Hamiltonian."""
    from .geometry import catalog_metric, geodesic_hamiltonian

    system = _system(spec)
    if system.spec.tier not in ("Geodesic3D", "PDMGeodesic"):
        raise ArgumentError("lift_check applies to geodesic tiers")
    T = geodesic_hamiltonian(catalog_metric(system.spec))
    Q, P = sample_cartesian(system, samples, seed)
    a = np.array([T(PhasePoint(q, p)) for q, p in zip(Q, P)])
    b = system.hamiltonian.values(Q, P)
    res = float(np.max(np.abs(a - b) / (1.0 + np.abs(a) + np.abs(b))))
    return Check("metric lift = H", "lift", res, LIFT_TOL, res <= LIFT_TOL)


# -- full report ---------------------------------------------------------------

def verify_system(spec: SystemSpec, seed: int = DEFAULT_SEED, samples: int = DEFAULT_SAMPLES,
                  flow: bool = True, mutation=None, h: float = 1e-3,
                  t_end: float = 10.0) -> VerificationReport:
    """Run every applicable suite on one catalog system."""
    system = build_system(spec, mutation)
    report = VerificationReport(spec, seed, samples)
    inv = involution_matrix(system, samples, seed)
    for rel, res, ok in inv.declared:
        report.checks.append(Check(str(rel), "involution", res, BRACKET_TOL, ok))
    report.checks += identity_checks(system, samples, seed)
    report.checks += negative_controls(system, samples, seed)
    rank = independence_rank(system, samples, seed)
    report.checks.append(Check(
        f"rank {{{', '.join(rank['names'])}}} = {rank['expected']}", "independence",
        float(samples - rank["hits"]), float(samples // 200), rank["passed"]))
    if spec.tier in ("Geodesic3D", "PDMGeodesic"):
        report.checks.append(lift_check(system, samples, seed))
    if spec.tier in PDM_TIERS or spec.tier in POTENTIAL_TIERS:
        if mutation is None:
            report.checks += limit_check(spec, samples, seed)
    if flow:
        report.checks += conservation_check(system, h, t_end, seed=seed)[0]
    return report


__all__ = [
    "Check", "VerificationReport", "InvolutionMatrix", "ReductionResult", "involution_matrix",
    "independence_rank", "identity_checks", "negative_controls", "conservation_check",
    "reduction_check", "limit_check", "lift_check", "relation_residual", "verify_system",
]

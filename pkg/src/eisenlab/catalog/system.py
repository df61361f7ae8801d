"""Assembly of catalog systems into observables and declared relations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..charts import Chart, from_cartesian_components, get_chart, to_cartesian_components
from ..core import Observable, PhasePoint
from ..errors import DomainError, SpecError, UnknownObservable
from . import families as fam
from .spec import FAMILIES, POTENTIAL_TIERS, TIERS, BracketRelation, Params, SystemSpec


@dataclass(frozen=True, eq=False)
class System:
    """A built catalog entry.

    ``integrals`` is the declared independent set, ``auxiliary`` holds further
    integrals and alternative forms used by identity and chart checks.
    """

    spec: SystemSpec
    hamiltonian: Observable
    integrals: list[Observable]
    relations: list[BracketRelation]
    charts: list[Chart]
    auxiliary: dict[str, Observable] = field(default_factory=dict)
    fields: dict[str, Observable] = field(default_factory=dict)
    chart_hamiltonians: dict[str, Observable] = field(default_factory=dict)
    involution: tuple[str, ...] = ()
    linear_integrals: tuple[str, ...] = ()
    mutation: tuple[str, str] | None = None

    @property
    def ndof(self) -> int:
        return self.spec.ndof

    @property
    def observables(self) -> dict[str, Observable]:
        out = {self.hamiltonian.name: self.hamiltonian}
        for o in self.integrals:
            out[o.name] = o
        out.update(self.auxiliary)
        return out

    def __getitem__(self, name: str) -> Observable:
        obs = self.observables
        if name in obs:
            return obs[name]
        if name in self.fields:
            return self.fields[name]
        alias = _ALIASES.get(name)
        if alias and alias in obs:
            return obs[alias]
        raise UnknownObservable(f"{name!r} is not an observable of {self.spec.label}")

    @property
    def conserved(self) -> list[Observable]:
        """Every observable claimed constant along the flow (Hamiltonian included)."""
        out = [self.hamiltonian] + [o for o in self.integrals if o.name != self.hamiltonian.name]
        out += [o for n, o in self.auxiliary.items()]
        return out

    def in_domain(self, q_cart, margin: float = 0.0):
        return self.hamiltonian.domain(q_cart, margin)


_ALIASES = {"I_c1": "H_c", "I_d1": "H_d"}


def _domain_fn(fdef: fam.FamilyDef, spec: SystemSpec) -> Callable:
    lam = spec.lam
    planar_mu = fdef.mass

    def domain(q, margin=0.0):
        x, y = np.asarray(q[0], float), np.asarray(q[1], float)
        ok = fdef.domain(x, y, margin)
        if lam != 0.0:
            with np.errstate(all="ignore"):
                mu = planar_mu("Cartesian", x, y, lam)
            ok = ok & (mu > margin)
        return ok

    return domain


def _field_obs(name, fn, ndof, domain, spec):
    return Observable(name, fn, ndof, degree_in_p=0, domain=domain, system=spec)


def build_system(spec: SystemSpec, mutation: tuple[str, str] | None = None) -> System:
    """Construct Hamiltonian, integrals and relation table for ``spec``.

    ``mutation=(integral_name, coefficient)`` flips the sign of one coefficient
    inside that integral only; the Hamiltonian and every other observable keep
    the true parameters. Used as a control that the checks can fail.
    """
    if not isinstance(spec, SystemSpec):
        raise SpecError("build_system expects a SystemSpec")
    fdef = fam.FAMILY_DEFS[spec.family]
    if mutation is not None:
        name, coef = mutation
        spec.params.flipped(coef)  # validates the coefficient name
    build = _build_2d if spec.tier == "Euclidean2D" else _build_3d
    system = build(spec, fdef, mutation)
    if mutation is not None:
        targets = [n for n in system.observables if n != system.hamiltonian.name]
        if mutation[0] not in targets:
            raise UnknownObservable(
                f"cannot mutate {mutation[0]!r}; integrals of {spec.label}: {', '.join(targets)}")
    return system


def _params_for(name, prm: Params, mutation):
    if mutation is not None and mutation[0] == name:
        return prm.flipped(mutation[1])
    return prm


def _build_3d(spec: SystemSpec, fdef: fam.FamilyDef, mutation) -> System:
    prm = spec.params
    f = fdef.name
    domain = _domain_fn(fdef, spec)
    cart = get_chart("Cartesian3")

    def chart_h(planar: str):
        V = fdef.potential(planar)

        def H(q, p):
            a, b = q[0], q[1]
            half_p = 0.5 * (p[2] * p[2] + 2.0 * prm.Z(q[2]))
            # V is linear in its coefficients, so V(k) P/2 + V(t) = V(k P/2 + t)
            c1, c2, c3 = (prm.k1 * half_p + prm.t1, prm.k2 * half_p + prm.t2,
                          prm.k3 * half_p + prm.t3)
            num = 0.5 * fam.kinetic(planar, q, p) + V(a, b, c1, c2, c3)
            return num / fdef.mass(planar, a, b, prm.lam)

        return H

    h_cart = chart_h("Cartesian")
    hname = f"H_{f}"
    hamiltonian = Observable(hname, h_cart, 3, degree_in_p=2, chart=cart,
                             domain=domain, system=spec)

    chart_hamiltonians = {}
    for cid in fdef.charts:
        ch = get_chart(cid)
        if ch.planar == "Cartesian":
            continue
        native = chart_h(ch.planar)
        chart_hamiltonians[cid] = Observable(
            f"{hname}@{cid}", _pullback(ch, native), 3, degree_in_p=2, chart=ch,
            native=native, domain=domain, system=spec)

    def h_in(chart: Chart):
        if chart.planar == "Cartesian":
            return h_cart
        return chart_h(chart.planar)

    def make(idef: fam.IntegralDef, degree=2):
        ch = get_chart(idef.chart)
        c = _params_for(idef.name, prm, mutation)
        Hc = h_in(ch)
        expr = idef.expr

        def native(q, p):
            return expr(q, p, c, lambda: Hc(q, p))

        fn = native if ch.planar == "Cartesian" else _pullback(ch, native)
        return Observable(idef.name, fn, 3, degree_in_p=degree, chart=ch,
                          native=native if ch.planar != "Cartesian" else None,
                          domain=domain, system=spec)

    potential = spec.tier in POTENTIAL_TIERS
    k1 = fam.IntegralDef(f"K_{f}1", "Cartesian3", fam.K1_POTENTIAL if potential else fam.K1_GEODESIC,
                         False)
    observables = {k1.name: make(k1, degree=2 if potential else 1)}
    for idef in fdef.integrals:
        observables[idef.name] = make(idef)

    auxiliary_defs = list(fdef.auxiliary)
    if f == "d" and spec.lam == 0.0:
        auxiliary_defs += list(fam.FAMILY_D_CARTESIAN_LRL)
    auxiliary = {}
    for idef in auxiliary_defs:
        auxiliary[idef.name] = make(idef)

    integrals = [hamiltonian if n == hname else observables[n] for n in fdef.independent]
    for name, o in observables.items():
        if name not in fdef.independent:
            auxiliary[name] = o

    relations = _relations_3d(fdef, hname, observables, auxiliary)
    fields = _scalar_fields(fdef, spec, domain, 3)
    return System(spec, hamiltonian, integrals, relations,
                  [get_chart(c) for c in fdef.charts], auxiliary, fields, chart_hamiltonians,
                  tuple(fdef.involution), (k1.name,), mutation)


def _pullback(chart: Chart, native):
    def fn(q, p):
        qc, pc = from_cartesian_components(chart, q, p)
        return native(qc, pc)

    return fn


def _relations_3d(fdef, hname, observables, auxiliary):
    rel = []
    inv = list(fdef.involution)
    for i in range(len(inv)):
        for j in range(i + 1, len(inv)):
            rel.append(BracketRelation(inv[i], inv[j], "zero"))
    # every integral commutes with the Hamiltonian
    names = [n for n in observables] + [n for n in auxiliary if "[" in n]
    for n in names:
        r = BracketRelation(n, hname, "zero")
        if not any({x.lhs, x.rhs} == {n, hname} for x in rel):
            rel.append(r)
    k1 = f"K_{fdef.name}1"
    for idef in fdef.integrals:
        if idef.name.startswith("J") and not any({x.lhs, x.rhs} == {k1, idef.name} for x in rel):
            rel.append(BracketRelation(k1, idef.name, "zero"))
    if fdef.half_sum:
        rel.append(BracketRelation(*fdef.half_sum, kind="half_sum_equals", target=hname))
    for a, b in fdef.sum_zero:
        rel.append(BracketRelation(a, b, kind="sum_zero"))
    rel.append(BracketRelation(*fdef.negative, kind="nonzero"))
    return rel


def _scalar_fields(fdef, spec, domain, ndof):
    prm = spec.params
    f = fdef.name
    V = fdef.potential("Cartesian")
    out = {
        f"V_{f}": lambda q, p: V(q[0], q[1], prm.k1, prm.k2, prm.k3),
        f"U_{f}": lambda q, p: V(q[0], q[1], prm.t1, prm.t2, prm.t3),
    }
    if ndof == 3:
        out[f"mu_{f}"] = lambda q, p: fdef.mass("Cartesian", q[0], q[1], prm.lam) + 0.0 * q[0]
    return {n: _field_obs(n, fn, ndof, domain, spec) for n, fn in out.items()}


def _build_2d(spec: SystemSpec, fdef: fam.FamilyDef, mutation) -> System:
    prm = spec.params
    f = fdef.name
    domain = _domain_fn(fdef, spec)
    V = fdef.potential("Cartesian")
    hname = f"H_{f}"

    def H(q, p):
        return 0.5 * (p[0] * p[0] + p[1] * p[1]) + V(q[0], q[1], prm.k1, prm.k2, prm.k3)

    chart = get_chart("Cartesian2")
    hamiltonian = Observable(hname, H, 2, degree_in_p=2, chart=chart, domain=domain, system=spec)
    obs = {}
    for name, expr in fdef.integrals2d.items():
        c = _params_for(name, prm, mutation)
        obs[name] = Observable(name, (lambda e, cc: lambda q, p: e(q, p, cc))(expr, c), 2,
                               degree_in_p=2, chart=chart, domain=domain, system=spec)
    integrals = [hamiltonian if n == hname else obs[n] for n in fdef.independent2d]
    auxiliary = {n: o for n, o in obs.items() if n not in fdef.independent2d}

    rel = [BracketRelation(a, b, "zero") for a, b in fdef.involution2d]
    for n in obs:
        rel.append(BracketRelation(n, hname, "zero"))
    if fdef.sum2d:
        rel.append(BracketRelation(*fdef.sum2d, kind="sum_equals", target=hname))
    rel.append(BracketRelation(*fdef.negative2d, kind="nonzero"))
    fields = _scalar_fields(fdef, spec, domain, 2)
    inv = fdef.involution2d[0] if fdef.involution2d else (hname, fdef.independent2d[1])
    return System(spec, hamiltonian, integrals, rel, [chart], auxiliary, fields, {}, inv, (),
                  mutation)


def _point_components(z: PhasePoint, chart: Chart):
    """Coordinates of z in ``chart`` as plain float lists."""
    if z.chart.id == chart.id:
        return list(z.q), list(z.p)
    if z.chart.planar == "Cartesian":
        q, p = list(z.q), list(z.p)
    else:
        q, p = to_cartesian_components(z.chart, list(z.q), list(z.p))
    if chart.planar == "Cartesian":
        return [float(v) for v in q], [float(v) for v in p]
    if not chart.in_image(q):
        raise DomainError(f"point outside the image of {chart.id}")
    qc, pc = from_cartesian_components(chart, q, p)
    return [float(v) for v in qc], [float(v) for v in pc]


def evaluate(spec: SystemSpec | System, name: str, z: PhasePoint) -> float:
    """Value of a named observable (or V/U/mu field) of the system at ``z``."""
    system = spec if isinstance(spec, System) else build_system(spec)
    obs = system[name]
    return obs(z)


def u_potential_identity_check(family: str, coeffs, samples: int = 100, seed: int = 42,
                               points=None) -> float:
    """max |U(x, y; t) - V(x, y; k := t)| / (1 + |V|) over sampled points.

    U is read off the Potential3D Hamiltonian at p = 0 with Z = 0 (in every
    separable chart, using the chart-native formulas); V comes from the 2D
    Hamiltonian with k := t at p = 0.
    """
    from .sampling import sample_cartesian

    if family not in FAMILIES:
        raise SpecError(f"unknown family {family!r}")
    t = tuple(float(c) for c in coeffs)
    pot = build_system(SystemSpec(family, "Potential3D", (0.0, 0.0, 0.0), t))
    base = build_system(SystemSpec(family, "Euclidean2D", t))
    if points is None:
        Q, _ = sample_cartesian(pot, samples, seed)
        points = [(float(a), float(b)) for a, b in Q[:, :2]]
    worst = 0.0
    for x, y in points:
        v = base.hamiltonian(PhasePoint([x, y], [0.0, 0.0]))
        z3 = PhasePoint([x, y, 0.0], [0.0, 0.0, 0.0])
        us = [pot.hamiltonian(z3)]
        for ch_obs in pot.chart_hamiltonians.values():
            q, p = _point_components(z3, ch_obs.chart)
            us.append(ch_obs(PhasePoint(q, p, ch_obs.chart)))
        for u in us:
            worst = max(worst, abs(u - v) / (1.0 + abs(v)))
    return worst


def catalog_listing() -> list[dict]:
    """All 20 catalog entries with their Hamiltonian and integral names."""
    out = []
    for f in FAMILIES:
        for tier in TIERS:
            s = build_system(SystemSpec.default(f, tier))
            out.append({
                "family": f, "tier": tier, "hamiltonian": s.hamiltonian.name,
                "integrals": [o.name for o in s.integrals],
                "charts": [c.id for c in s.charts],
                "title": fam.FAMILY_DEFS[f].title,
            })
    return out


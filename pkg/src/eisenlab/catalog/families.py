"""Closed-form potentials, masses and constants of motion of the four families.

One formula per family covers every 3D tier. With ``P = p_z^2 + 2 Z(z)``::

    H = ( (kinetic + V P)/2 + U ) / mu

where U is V evaluated with the t coefficients. The lower tiers are the
special cases lam = 0 (mu = 1 exactly), t = 0 and Z = 0 (U = 0 exactly), so
the limit chain holds along identical arithmetic. In the geodesic tiers the
shared integral is p_z itself; in the potential tiers it is P.

All expressions accept floats, sample arrays and jets. Chart-native
expressions take ``(q, p)`` in the variables of the named chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..jets import cos, sin, sqrt

SQ2 = math.sqrt(2.0)


def _P(q, p, c):
    return p[2] * p[2] + 2.0 * c.Z(q[2])


def kinetic(planar: str, q, p):
    """Euclidean (p_x^2 + p_y^2) written in the planar chart."""
    if planar == "Cartesian":
        return p[0] * p[0] + p[1] * p[1]
    if planar == "Cylindrical":
        return p[0] * p[0] + p[1] * p[1] / (q[0] * q[0])
    return (p[0] * p[0] + p[1] * p[1]) / (q[0] * q[0] + q[1] * q[1])


# -- potentials V(q; c1, c2, c3) per chart ------------------------------------

def _va_cart(x, y, c1, c2, c3):
    return 0.5 * c1 * (x * x + y * y) + c2 / (x * x) + c3 / (y * y)


def _va_cyl(r, phi, c1, c2, c3):
    r2 = r * r
    cf, sf = cos(phi), sin(phi)
    return 0.5 * c1 * r2 + c2 / (r2 * cf * cf) + c3 / (r2 * sf * sf)


def _vb_cart(x, y, c1, c2, c3):
    return 0.5 * c1 * (4.0 * x * x + y * y) + c2 / (y * y) + c3 * x


def _vb_par(tau, sig, c1, c2, c3):
    t2, s2 = tau * tau, sig * sig
    return (0.5 * c1 * (t2 * t2 * t2 + s2 * s2 * s2) + c2 * (1.0 / t2 + 1.0 / s2)
            + 0.5 * c3 * (t2 * t2 - s2 * s2)) / (t2 + s2)


def _vc_cart(x, y, c1, c2, c3):
    r = sqrt(x * x + y * y)
    y2 = y * y
    return c1 / r + c2 / y2 + c3 * x / (y2 * r)


def _vc_cyl(r, phi, c1, c2, c3):
    sf = sin(phi)
    return c1 / r + (c2 + c3 * cos(phi)) / (r * r * sf * sf)


def _vc_par(tau, sig, c1, c2, c3):
    t2, s2 = tau * tau, sig * sig
    return (2.0 * c1 + c2 * (1.0 / t2 + 1.0 / s2) + c3 * (1.0 / s2 - 1.0 / t2)) / (t2 + s2)


def _vd_cart(x, y, c1, c2, c3):
    r = sqrt(x * x + y * y)
    return (c1 + c2 * sqrt(r + x) + c3 * sqrt(r - x)) / r


def _vd_par(tau, sig, c1, c2, c3):
    return 2.0 * (c1 + c2 * tau + c3 * sig) / (tau * tau + sig * sig)


def _vd_par2(a, b, c1, c2, c3):
    return (2.0 * c1 + SQ2 * c2 * (a + b) + SQ2 * c3 * (a - b)) / (a * a + b * b)


# -- position-dependent masses ------------------------------------------------

def _mu_a(planar, q1, q2, lam):
    if planar == "Cylindrical":
        return 1.0 - lam * (q1 * q1)
    return 1.0 - lam * (q1 * q1 + q2 * q2)


def _mu_b(planar, q1, q2, lam):
    if planar == "ParabolicCylI":
        return 1.0 - 0.5 * lam * (q1 * q1 - q2 * q2)
    return 1.0 - lam * q1


def _mu_kc(planar, q1, q2, lam):
    if planar == "Cylindrical":
        return 1.0 - lam / q1
    if planar == "Cartesian":
        return 1.0 - lam / sqrt(q1 * q1 + q2 * q2)
    return 1.0 - 2.0 * lam / (q1 * q1 + q2 * q2)


# -- integrals: expr(q, p, c, H) with H a zero-argument callable ---------------

def _k1_geo(q, p, c, H):
    return p[2]


def _k1_pot(q, p, c, H):
    return _P(q, p, c)


def _ka2(q, p, c, H):
    x = q[0]
    x2 = x * x
    out = p[0] * p[0] + (0.5 * c.k1 * x2 + c.k2 / x2) * _P(q, p, c) + c.t1 * x2 + 2.0 * c.t2 / x2
    return out + 2.0 * c.lam * x2 * H() if c.lam else out


def _ka3(q, p, c, H):
    y = q[1]
    y2 = y * y
    out = p[1] * p[1] + (0.5 * c.k1 * y2 + c.k3 / y2) * _P(q, p, c) + c.t1 * y2 + 2.0 * c.t3 / y2
    return out + 2.0 * c.lam * y2 * H() if c.lam else out


def _ja2(q, p, c, H):  # cylindrical
    cf, sf = cos(q[1]), sin(q[1])
    ic, is_ = 1.0 / (cf * cf), 1.0 / (sf * sf)
    return p[1] * p[1] + (c.k2 * ic + c.k3 * is_) * _P(q, p, c) + 2.0 * c.t2 * ic + 2.0 * c.t3 * is_


def _ja3(q, p, c, H):  # cylindrical
    r2 = q[0] * q[0]
    r4 = r2 * r2
    return (r2 * p[0] * p[0] + 0.5 * c.k1 * r4 * _P(q, p, c) + c.t1 * r4
            - 2.0 * (r2 - c.lam * r4) * H())


def _ja2_cart(q, p, c, H):
    x, y = q[0], q[1]
    L = x * p[1] - y * p[0]
    r2 = x * x + y * y
    ax, ay = r2 / (x * x), r2 / (y * y)
    return L * L + (c.k2 * ax + c.k3 * ay) * _P(q, p, c) + 2.0 * c.t2 * ax + 2.0 * c.t3 * ay


def _kb2(q, p, c, H):
    x = q[0]
    x2 = x * x
    out = (p[0] * p[0] + (2.0 * c.k1 * x2 + c.k3 * x) * _P(q, p, c)
           + 4.0 * c.t1 * x2 + 2.0 * c.t3 * x)
    return out + 2.0 * c.lam * x * H() if c.lam else out


def _kb3(q, p, c, H):
    y = q[1]
    y2 = y * y
    return p[1] * p[1] + (0.5 * c.k1 * y2 + c.k2 / y2) * _P(q, p, c) + c.t1 * y2 + 2.0 * c.t2 / y2


def _jb2(q, p, c, H):  # parabolic I
    u2 = q[0] * q[0]
    u4 = u2 * u2
    u6 = u4 * u2
    return (p[0] * p[0] + (0.5 * c.k1 * u6 + c.k2 / u2 + 0.5 * c.k3 * u4) * _P(q, p, c)
            + c.t1 * u6 + 2.0 * c.t2 / u2 + c.t3 * u4 - u2 * (2.0 - c.lam * u2) * H())


def _jb3(q, p, c, H):  # parabolic I
    u2 = q[1] * q[1]
    u4 = u2 * u2
    u6 = u4 * u2
    return (p[1] * p[1] + (0.5 * c.k1 * u6 + c.k2 / u2 - 0.5 * c.k3 * u4) * _P(q, p, c)
            + c.t1 * u6 + 2.0 * c.t2 / u2 - c.t3 * u4 - u2 * (2.0 + c.lam * u2) * H())


def _kc2(q, p, c, H):  # cylindrical
    cf, sf = cos(q[1]), sin(q[1])
    is2 = 1.0 / (sf * sf)
    return (p[1] * p[1] + (c.k2 + c.k3 * cf) * is2 * _P(q, p, c)
            + 2.0 * (c.t2 + c.t3 * cf) * is2)


def _kc3(q, p, c, H):  # cylindrical
    r = q[0]
    return (r * r * p[0] * p[0] + c.k1 * r * _P(q, p, c) + 2.0 * c.t1 * r
            - 2.0 * r * (r - c.lam) * H())


def _kc2_cart(q, p, c, H):
    x, y = q[0], q[1]
    L = x * p[1] - y * p[0]
    r = sqrt(x * x + y * y)
    w = r * r / (y * y)
    return L * L + (c.k2 + c.k3 * x / r) * w * _P(q, p, c) + 2.0 * (c.t2 + c.t3 * x / r) * w


def _jc2(q, p, c, H):  # parabolic I
    u2 = q[0] * q[0]
    return (p[0] * p[0] + (c.k1 + (c.k2 - c.k3) / u2) * _P(q, p, c)
            + 2.0 * c.t1 + 2.0 * (c.t2 - c.t3) / u2 + 2.0 * (c.lam - u2) * H())


def _jc3(q, p, c, H):  # parabolic I
    u2 = q[1] * q[1]
    return (p[1] * p[1] + (c.k1 + (c.k2 + c.k3) / u2) * _P(q, p, c)
            + 2.0 * c.t1 + 2.0 * (c.t2 + c.t3) / u2 + 2.0 * (c.lam - u2) * H())


def _kd2(q, p, c, H):  # parabolic I
    u = q[0]
    return (p[0] * p[0] + (c.k1 + 2.0 * c.k2 * u) * _P(q, p, c)
            + 2.0 * c.t1 + 4.0 * c.t2 * u + 2.0 * (c.lam - u * u) * H())


def _kd3(q, p, c, H):  # parabolic I
    u = q[1]
    return (p[1] * p[1] + (c.k1 + 2.0 * c.k3 * u) * _P(q, p, c)
            + 2.0 * c.t1 + 4.0 * c.t3 * u + 2.0 * (c.lam - u * u) * H())


def _jd2(q, p, c, H):  # parabolic II
    u = q[0]
    return (p[0] * p[0] + (c.k1 + SQ2 * (c.k2 + c.k3) * u) * _P(q, p, c)
            + 2.0 * c.t1 + 2.0 * SQ2 * (c.t2 + c.t3) * u + 2.0 * (c.lam - u * u) * H())


def _jd3(q, p, c, H):  # parabolic II
    u = q[1]
    return (p[1] * p[1] + (c.k1 + SQ2 * (c.k2 - c.k3) * u) * _P(q, p, c)
            + 2.0 * c.t1 + 2.0 * SQ2 * (c.t2 - c.t3) * u + 2.0 * (c.lam - u * u) * H())


def _kd2_lrl(q, p, c, H):
    """K_d2 rewritten without the Hamiltonian, parabolic I variables."""
    tau, sig = q[0], q[1]
    pt, ps = p[0], p[1]
    t2, s2 = tau * tau, sig * sig
    D = t2 + s2 - 2.0 * c.lam
    kin = s2 * pt * pt - t2 * ps * ps + c.lam * (ps * ps - pt * pt)
    pot_k = c.k1 * (s2 - t2) + 2.0 * c.k2 * tau * (s2 - c.lam) - 2.0 * c.k3 * sig * (t2 - c.lam)
    pot_t = 2.0 * c.t1 * (s2 - t2) + 4.0 * c.t2 * tau * (s2 - c.lam) - 4.0 * c.t3 * sig * (t2 - c.lam)
    return (kin + pot_k * _P(q, p, c) + pot_t) / D


def _jd2_lrl(q, p, c, H):
    """J_d2 rewritten without the Hamiltonian, parabolic I variables."""
    tau, sig = q[0], q[1]
    pt, ps = p[0], p[1]
    t2, s2 = tau * tau, sig * sig
    D = t2 + s2 - 2.0 * c.lam
    kin = (tau * ps - sig * pt) * (tau * pt - sig * ps) - 2.0 * c.lam * pt * ps
    pot_k = (2.0 * c.k1 * tau * sig + c.k2 * (t2 - s2 + 2.0 * c.lam) * sig
             - c.k3 * (t2 - s2 - 2.0 * c.lam) * tau)
    pot_t = (4.0 * c.t1 * tau * sig + 2.0 * c.t2 * (t2 - s2 + 2.0 * c.lam) * sig
             - 2.0 * c.t3 * (t2 - s2 - 2.0 * c.lam) * tau)
    return (kin - pot_k * _P(q, p, c) - pot_t) / D


def _lrl_terms(q, p, c):
    x, y = q[0], q[1]
    r = sqrt(x * x + y * y)
    half = 0.5 * _P(q, p, c)
    e1, e2, e3 = half * c.k1 + c.t1, half * c.k2 + c.t2, half * c.k3 + c.t3
    L = x * p[1] - y * p[0]
    sp, sm = sqrt(r + x), sqrt(r - x)
    return x, y, r, L, e1, e2, e3, sp, sm


def _kd2_cart(q, p, c, H):
    """K_d2 = -2 (L p_y + W2) in Cartesian variables (valid for lam = 0)."""
    x, y, r, L, e1, e2, e3, sp, sm = _lrl_terms(q, p, c)
    return -2.0 * (L * p[1] + (e1 * x - e2 * y * sm + e3 * y * sp) / r)


def _jd2_cart(q, p, c, H):
    """J_d2 = 2 (L p_x + W3) in Cartesian variables (valid for lam = 0)."""
    x, y, r, L, e1, e2, e3, sp, sm = _lrl_terms(q, p, c)
    return 2.0 * (L * p[0] + (-e1 * y - e2 * x * sm + e3 * x * sp) / r)


# -- 2D integrals (Cartesian) -----------------------------------------------------

def _ia1(q, p, c):
    x2 = q[0] * q[0]
    return 0.5 * p[0] * p[0] + 0.5 * c.k1 * x2 + c.k2 / x2


def _ia2(q, p, c):
    y2 = q[1] * q[1]
    return 0.5 * p[1] * p[1] + 0.5 * c.k1 * y2 + c.k3 / y2


def _ia3(q, p, c):
    x, y = q[0], q[1]
    L = x * p[1] - y * p[0]
    u, v = y / x, x / y
    return L * L + 2.0 * c.k2 * u * u + 2.0 * c.k3 * v * v


def _ib1(q, p, c):
    x = q[0]
    return 0.5 * p[0] * p[0] + 2.0 * c.k1 * x * x + c.k3 * x


def _ib2(q, p, c):
    y2 = q[1] * q[1]
    return 0.5 * p[1] * p[1] + 0.5 * c.k1 * y2 + c.k2 / y2


def _ib3(q, p, c):
    x, y = q[0], q[1]
    L = x * p[1] - y * p[0]
    y2 = y * y
    return L * p[1] - c.k1 * x * y2 + 2.0 * c.k2 * x / y2 - 0.5 * c.k3 * y2


def _ic2(q, p, c):
    x, y = q[0], q[1]
    L = x * p[1] - y * p[0]
    r = sqrt(x * x + y * y)
    y2 = y * y
    return L * L + 2.0 * c.k2 * x * x / y2 + 2.0 * c.k3 * x * r / y2


def _ic3(q, p, c):
    x, y = q[0], q[1]
    L = x * p[1] - y * p[0]
    r = sqrt(x * x + y * y)
    y2 = y * y
    return (L * p[1] + c.k1 * x / r + 2.0 * c.k2 * x / y2
            + c.k3 * (2.0 * x * x + y2) / (y2 * r))


def _id2(q, p, c):
    x, y = q[0], q[1]
    L = x * p[1] - y * p[0]
    r = sqrt(x * x + y * y)
    return L * p[1] + (c.k1 * x - c.k2 * y * sqrt(r - x) + c.k3 * y * sqrt(r + x)) / r


def _id3(q, p, c):
    x, y = q[0], q[1]
    L = x * p[1] - y * p[0]
    r = sqrt(x * x + y * y)
    return L * p[0] + (-c.k1 * y - c.k2 * x * sqrt(r - x) + c.k3 * x * sqrt(r + x)) / r


# -- domain predicates on Cartesian (x, y), vectorised -----------------------------

def _arr(v):
    return np.asarray(v, dtype=float)


def _dom_a(x, y, m):
    r = np.hypot(x, y)
    return (np.abs(x) > m) & (np.abs(y) > m) & (np.abs(x) > m * r) & (np.abs(y) > m * r)


def _dom_b(x, y, m):
    r = np.hypot(x, y)
    tau = np.sqrt(np.maximum(r + x, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        sig = np.where(tau > 0, y / np.where(tau > 0, tau, 1.0), 0.0)
    return (np.abs(y) > m) & (tau > m) & (np.abs(sig) > m)


def _dom_c(x, y, m):
    r = np.hypot(x, y)
    return (r > m) & (np.abs(y) > m) & (np.abs(y) > m * r) & _dom_b(x, y, m)


def _dom_d(x, y, m):
    r = np.hypot(x, y)
    tau = np.sqrt(np.maximum(r + x, 0.0))
    sig = np.sqrt(np.maximum(r - x, 0.0))
    alpha = np.sqrt(np.maximum(r + y, 0.0))
    return (y > m) & (r > m) & (tau > m) & (sig > m) & (alpha > m)


@dataclass(frozen=True)
class IntegralDef:
    """Constant of motion written in one chart of its family."""

    name: str
    chart: str
    expr: Callable
    uses_hamiltonian: bool = True


@dataclass(frozen=True)
class FamilyDef:
    name: str
    title: str
    charts: tuple[str, str]
    potentials: dict  # planar chart -> V(q1, q2, c1, c2, c3)
    mass: Callable  # mass(planar, q1, q2, lam)
    integrals: tuple[IntegralDef, ...]  # K2, K3, J2, J3 in this order
    auxiliary: tuple[IntegralDef, ...]
    independent: tuple[str, ...]  # 3D declared independent set (before K1 tier swap)
    involution: tuple[str, ...]
    sum_zero: tuple[tuple[str, str], ...]
    half_sum: tuple[str, str] | None
    negative: tuple[str, str]
    integrals2d: dict  # name -> expr(q, p, c)
    independent2d: tuple[str, ...]
    involution2d: tuple[tuple[str, str], ...]
    sum2d: tuple[str, str] | None
    negative2d: tuple[str, str]
    domain: Callable  # domain(x, y, margin) -> bool array

    def potential(self, planar: str):
        return self.potentials[planar]


FAMILY_A = FamilyDef(
    name="a", title="isotropic oscillator", charts=("Cartesian3", "Cylindrical"),
    potentials={"Cartesian": _va_cart, "Cylindrical": _va_cyl},
    mass=_mu_a,
    integrals=(IntegralDef("K_a2", "Cartesian3", _ka2), IntegralDef("K_a3", "Cartesian3", _ka3),
               IntegralDef("J_a2", "Cylindrical", _ja2, False),
               IntegralDef("J_a3", "Cylindrical", _ja3)),
    auxiliary=(IntegralDef("J_a2[cartesian]", "Cartesian3", _ja2_cart, False),),
    independent=("K_a1", "K_a2", "K_a3", "J_a2"),
    involution=("K_a1", "K_a2", "K_a3"),
    sum_zero=(("J_a2", "J_a3"),), half_sum=("K_a2", "K_a3"), negative=("K_a2", "J_a2"),
    integrals2d={"I_a1": _ia1, "I_a2": _ia2, "I_a3": _ia3},
    independent2d=("I_a1", "I_a2", "I_a3"),
    involution2d=(("I_a1", "I_a2"),), sum2d=("I_a1", "I_a2"), negative2d=("I_a1", "I_a3"),
    domain=_dom_a,
)

FAMILY_B = FamilyDef(
    name="b", title="anisotropic oscillator", charts=("Cartesian3", "ParabolicCylI"),
    potentials={"Cartesian": _vb_cart, "ParabolicCylI": _vb_par},
    mass=_mu_b,
    integrals=(IntegralDef("K_b2", "Cartesian3", _kb2), IntegralDef("K_b3", "Cartesian3", _kb3, False),
               IntegralDef("J_b2", "ParabolicCylI", _jb2),
               IntegralDef("J_b3", "ParabolicCylI", _jb3)),
    auxiliary=(),
    independent=("K_b1", "K_b2", "K_b3", "J_b2"),
    involution=("K_b1", "K_b2", "K_b3"),
    sum_zero=(("J_b2", "J_b3"),), half_sum=("K_b2", "K_b3"), negative=("K_b2", "J_b2"),
    integrals2d={"I_b1": _ib1, "I_b2": _ib2, "I_b3": _ib3},
    independent2d=("I_b1", "I_b2", "I_b3"),
    involution2d=(("I_b1", "I_b2"),), sum2d=("I_b1", "I_b2"), negative2d=("I_b1", "I_b3"),
    domain=_dom_b,
)

FAMILY_C = FamilyDef(
    name="c", title="Kepler-Coulomb I", charts=("Cylindrical", "ParabolicCylI"),
    potentials={"Cartesian": _vc_cart, "Cylindrical": _vc_cyl, "ParabolicCylI": _vc_par},
    mass=_mu_kc,
    integrals=(IntegralDef("K_c2", "Cylindrical", _kc2, False),
               IntegralDef("K_c3", "Cylindrical", _kc3),
               IntegralDef("J_c2", "ParabolicCylI", _jc2),
               IntegralDef("J_c3", "ParabolicCylI", _jc3)),
    auxiliary=(IntegralDef("K_c2[cartesian]", "Cartesian3", _kc2_cart, False),),
    independent=("H_c", "K_c1", "K_c2", "J_c2"),
    involution=("H_c", "K_c1", "K_c2"),
    sum_zero=(("K_c2", "K_c3"), ("J_c2", "J_c3")), half_sum=None, negative=("K_c2", "J_c2"),
    integrals2d={"I_c2": _ic2, "I_c3": _ic3},
    independent2d=("H_c", "I_c2", "I_c3"),
    involution2d=(), sum2d=None, negative2d=("I_c2", "I_c3"),
    domain=_dom_c,
)

FAMILY_D = FamilyDef(
    name="d", title="Kepler-Coulomb II", charts=("ParabolicCylI", "ParabolicCylII"),
    potentials={"Cartesian": _vd_cart, "ParabolicCylI": _vd_par, "ParabolicCylII": _vd_par2},
    mass=_mu_kc,
    integrals=(IntegralDef("K_d2", "ParabolicCylI", _kd2), IntegralDef("K_d3", "ParabolicCylI", _kd3),
               IntegralDef("J_d2", "ParabolicCylII", _jd2),
               IntegralDef("J_d3", "ParabolicCylII", _jd3)),
    auxiliary=(IntegralDef("K_d2[lrl]", "ParabolicCylI", _kd2_lrl, False),
               IntegralDef("J_d2[lrl]", "ParabolicCylI", _jd2_lrl, False)),
    independent=("H_d", "K_d1", "K_d2", "J_d2"),
    involution=("H_d", "K_d1", "K_d2"),
    sum_zero=(("K_d2", "K_d3"), ("J_d2", "J_d3")), half_sum=None, negative=("K_d2", "J_d2"),
    integrals2d={"I_d2": _id2, "I_d3": _id3},
    independent2d=("H_d", "I_d2", "I_d3"),
    involution2d=(), sum2d=None, negative2d=("I_d2", "I_d3"),
    domain=_dom_d,
)

# Cartesian Laplace-Runge-Lenz forms of family d, only meaningful at lam = 0.
FAMILY_D_CARTESIAN_LRL = (IntegralDef("K_d2[cartesian]", "Cartesian3", _kd2_cart, False),
                          IntegralDef("J_d2[cartesian]", "Cartesian3", _jd2_cart, False))

FAMILY_DEFS = {f.name: f for f in (FAMILY_A, FAMILY_B, FAMILY_C, FAMILY_D)}

K1_GEODESIC = _k1_geo
K1_POTENTIAL = _k1_pot

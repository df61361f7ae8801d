"""Coordinate charts with canonical (point-transformation) momentum lifts.

Every chart acts on the planar pair of coordinates; for 3D charts the lifted
coordinate ``z`` and its momentum pass through unchanged.

Planar maps to Cartesian::

    Cylindrical     x = r cos(phi),        y = r sin(phi)
    ParabolicCylI   x = (tau^2 - sig^2)/2, y = tau sig          (tau > 0)
    ParabolicCylII  x = alpha beta,        y = (alpha^2 - beta^2)/2 (alpha > 0)

ParabolicCylII is ParabolicCylI rotated: tau = (alpha + beta)/sqrt 2,
sig = (alpha - beta)/sqrt 2. Momenta transform as p_chart = J^T p_cart with
J the Jacobian of the map above.

All component functions are written with :mod:`eisenlab.jets` arithmetic so
they accept floats, sample arrays and jets alike.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .jets import Jet, atan2, cos, sin, sqrt, value_of

DEFAULT_MARGIN = 0.1


@dataclass(frozen=True)
class Chart:
    id: str
    dim: int
    coords: tuple[str, ...]

    @property
    def planar(self) -> str:
        return "Cartesian" if self.id.startswith("Cartesian") else self.id

    def __str__(self):
        return self.id

    def singular_distance(self, q):
        """Distance-like quantity that must stay positive inside the domain."""
        if self.planar == "Cartesian":
            return np.inf
        return np.asarray(q[0], dtype=float)  # r, tau or alpha

    def in_domain(self, q, margin: float = 0.0):
        return self.singular_distance(q) > margin

    def image_distance(self, q_cart):
        """Same quantity computed from Cartesian coordinates (the chart image)."""
        if self.planar == "Cartesian":
            return np.inf
        x, y = np.asarray(q_cart[0], float), np.asarray(q_cart[1], float)
        r = np.hypot(x, y)
        if self.planar == "Cylindrical":
            return r
        if self.planar == "ParabolicCylI":
            return np.sqrt(np.maximum(r + x, 0.0))
        return np.sqrt(np.maximum(r + y, 0.0))

    def in_image(self, q_cart, margin: float = 0.0):
        return self.image_distance(q_cart) > margin


CARTESIAN2 = Chart("Cartesian2", 2, ("x", "y"))
CARTESIAN3 = Chart("Cartesian3", 3, ("x", "y", "z"))
CYLINDRICAL = Chart("Cylindrical", 3, ("r", "phi", "z"))
PARABOLIC_I = Chart("ParabolicCylI", 3, ("tau", "sigma", "z"))
PARABOLIC_II = Chart("ParabolicCylII", 3, ("alpha", "beta", "z"))

CHARTS = {c.id: c for c in (CARTESIAN2, CARTESIAN3, CYLINDRICAL, PARABOLIC_I, PARABOLIC_II)}


def get_chart(chart) -> Chart:
    if isinstance(chart, Chart):
        return chart
    try:
        return CHARTS[chart]
    except KeyError:
        if isinstance(chart, str) and chart.startswith("Cartesian") and chart[9:].isdigit():
            return cartesian_for(int(chart[9:]))
        raise DomainError(f"unknown chart {chart!r}") from None


def cartesian_for(dim: int) -> Chart:
    if dim == 2:
        return CARTESIAN2
    if dim == 3:
        return CARTESIAN3
    return Chart(f"Cartesian{dim}", dim, tuple(f"q{i + 1}" for i in range(dim)))


# -- planar component maps (jet-compatible) ---------------------------------

def planar_to_cartesian(kind: str, q1, q2, p1, p2):
    if kind == "Cartesian":
        return q1, q2, p1, p2
    if kind == "Cylindrical":
        r, phi, pr, pphi = q1, q2, p1, p2
        c, s = cos(phi), sin(phi)
        return r * c, r * s, c * pr - s * pphi / r, s * pr + c * pphi / r
    if kind == "ParabolicCylI":
        tau, sig, pt, ps = q1, q2, p1, p2
        d = tau * tau + sig * sig
        return (0.5 * (tau * tau - sig * sig), tau * sig,
                (tau * pt - sig * ps) / d, (sig * pt + tau * ps) / d)
    if kind == "ParabolicCylII":
        a, b, pa, pb = q1, q2, p1, p2
        d = a * a + b * b
        return (a * b, 0.5 * (a * a - b * b),
                (b * pa + a * pb) / d, (a * pa - b * pb) / d)
    raise DomainError(f"unknown planar chart {kind!r}")


def planar_from_cartesian(kind: str, x, y, px, py):
    if kind == "Cartesian":
        return x, y, px, py
    r = sqrt(x * x + y * y)
    if kind == "Cylindrical":
        return r, atan2(y, x), (x * px + y * py) / r, x * py - y * px
    if kind == "ParabolicCylI":
        tau = sqrt(r + x)
        sig = y / tau
        return tau, sig, tau * px + sig * py, tau * py - sig * px
    if kind == "ParabolicCylII":
        a = sqrt(r + y)
        b = x / a
        return a, b, b * px + a * py, a * px - b * py
    raise DomainError(f"unknown planar chart {kind!r}")


def to_cartesian_components(chart, q, p):
    """Map chart coordinates (sequences of scalars/jets) to Cartesian ones."""
    chart = get_chart(chart)
    x, y, px, py = planar_to_cartesian(chart.planar, q[0], q[1], p[0], p[1])
    return (x, y, *q[2:]), (px, py, *p[2:])


def from_cartesian_components(chart, q, p):
    chart = get_chart(chart)
    a, b, pa, pb = planar_from_cartesian(chart.planar, q[0], q[1], p[0], p[1])
    return (a, b, *q[2:]), (pa, pb, *p[2:])


# -- PhasePoint level ---------------------------------------------------------

def to_cartesian(z, margin: float = DEFAULT_MARGIN):
    """Express a phase-space state in the Cartesian chart of the same dimension."""
    from .core import PhasePoint

    chart = get_chart(z.chart)
    if chart.planar == "Cartesian":
        return z
    if not chart.in_domain(z.q, margin):
        raise DomainError(
            f"{chart.id} point q={z.q.tolist()} within margin {margin} of the singular set")
    q, p = to_cartesian_components(chart, list(z.q), list(z.p))
    return PhasePoint(np.array(q, float), np.array(p, float), cartesian_for(chart.dim))


def from_cartesian(z, target, margin: float = DEFAULT_MARGIN):
    """Express a Cartesian state in ``target``; branch tau, alpha > 0, phi in (-pi, pi]."""
    from .core import PhasePoint

    target = get_chart(target)
    src = get_chart(z.chart)
    if src.planar != "Cartesian":
        z = to_cartesian(z, margin=0.0)
    if target.dim != z.n:
        raise DomainError(f"{target.id} has dimension {target.dim}, point has {z.n}")
    if target.planar == "Cartesian":
        return z
    if not target.in_image(z.q, margin):
        raise DomainError(
            f"Cartesian q={z.q.tolist()} outside the image of {target.id} (margin {margin})")
    q, p = from_cartesian_components(target, list(z.q), list(z.p))
    return PhasePoint(np.array(q, float), np.array(p, float), target)


def symplectomorphism_check(chart, z) -> float:
    """Max deviation of the chart's coordinate functions from canonical brackets.

    Q, P are taken as functions of the Cartesian variables at ``to_cartesian(z)``;
    the residual is max |M Omega M^T - Omega| with M = d(Q, P)/d(x, p).
    """
    chart = get_chart(chart)
    zc = to_cartesian(z, margin=0.0)
    n = zc.n
    seeds = Jet.seed(list(zc.q) + list(zc.p))
    Q, P = from_cartesian_components(chart, seeds[:n], seeds[n:])
    rows = []
    for f in (*Q, *P):
        rows.append(f.grad if isinstance(f, Jet) else np.zeros(2 * n))
    M = np.array(rows)
    omega = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    return float(np.max(np.abs(M @ omega @ M.T - omega)))


__all__ = [
    "Chart", "CHARTS", "CARTESIAN2", "CARTESIAN3", "CYLINDRICAL", "PARABOLIC_I",
    "PARABOLIC_II", "DEFAULT_MARGIN", "get_chart", "cartesian_for", "to_cartesian",
    "from_cartesian", "to_cartesian_components", "from_cartesian_components",
    "planar_to_cartesian", "planar_from_cartesian", "symplectomorphism_check", "value_of",
]

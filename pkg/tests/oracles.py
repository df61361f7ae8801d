"""Reference implementations that share no code with the package.

Formulas are typed directly in Cartesian form with plain numpy; derivatives
come from complex-step or central differences instead of jets; reference
trajectories come from scipy's DOP853 with tight tolerances.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp


# -- potentials -----------------------------------------------------------------

def V_a(x, y, k):
    return 0.5 * k[0] * (x**2 + y**2) + k[1] / x**2 + k[2] / y**2


def V_b(x, y, k):
    return 0.5 * k[0] * (4 * x**2 + y**2) + k[1] / y**2 + k[2] * x


def V_c(x, y, k):
    r = np.sqrt(x**2 + y**2)
    return k[0] / r + k[1] / y**2 + k[2] * x / (y**2 * r)


def V_d(x, y, k):
    r = np.sqrt(x**2 + y**2)
    return (k[0] + k[1] * np.sqrt(r + x) + k[2] * np.sqrt(r - x)) / r


POTENTIALS = {"a": V_a, "b": V_b, "c": V_c, "d": V_d}


def mass(family, x, y, lam):
    r = np.sqrt(x**2 + y**2)
    if family == "a":
        return 1 - lam * r**2
    if family == "b":
        return 1 - lam * x
    return 1 - lam / r


# -- planar integrals -------------------------------------------------------------

def planar_integrals(family, x, y, px, py, k):
    L = x * py - y * px
    r = np.sqrt(x**2 + y**2)
    if family == "a":
        return {
            "I_a1": 0.5 * px**2 + 0.5 * k[0] * x**2 + k[1] / x**2,
            "I_a2": 0.5 * py**2 + 0.5 * k[0] * y**2 + k[2] / y**2,
            "I_a3": L**2 + 2 * k[1] * (y / x) ** 2 + 2 * k[2] * (x / y) ** 2,
        }
    if family == "b":
        return {
            "I_b1": 0.5 * px**2 + 2 * k[0] * x**2 + k[2] * x,
            "I_b2": 0.5 * py**2 + 0.5 * k[0] * y**2 + k[1] / y**2,
            "I_b3": L * py - k[0] * x * y**2 + 2 * k[1] * x / y**2 - 0.5 * k[2] * y**2,
        }
    if family == "c":
        return {
            "I_c2": L**2 + 2 * k[1] * x**2 / y**2 + 2 * k[2] * x * r / y**2,
            "I_c3": L * py + k[0] * x / r + 2 * k[1] * x / y**2
            + k[2] * (2 * x**2 + y**2) / (y**2 * r),
        }
    sp, sm = np.sqrt(r + x), np.sqrt(r - x)
    return {
        "I_d2": L * py + k[0] * x / r - k[1] * y * sm / r + k[2] * y * sp / r,
        "I_d3": L * px - k[0] * y / r - k[1] * x * sm / r + k[2] * x * sp / r,
    }


def planar_hamiltonian(family, x, y, px, py, k):
    return 0.5 * (px**2 + py**2) + POTENTIALS[family](x, y, k)


def geodesic_hamiltonian(family, q, p, k, lam=0.0):
    x, y = q[0], q[1]
    V = POTENTIALS[family](x, y, k)
    return 0.5 * (p[0] ** 2 + p[1] ** 2 + V * p[2] ** 2) / mass(family, x, y, lam)


def lifted_a_integrals(q, p, k):
    """K_a2, K_a3 in Cartesian variables and J_a2 through polar momenta."""
    x, y = q[0], q[1]
    pz2 = p[2] ** 2
    phi = np.arctan2(y, x)
    p_phi = x * p[1] - y * p[0]
    return {
        "K_a2": p[0] ** 2 + (0.5 * k[0] * x**2 + k[1] / x**2) * pz2,
        "K_a3": p[1] ** 2 + (0.5 * k[0] * y**2 + k[2] / y**2) * pz2,
        "J_a2": p_phi**2 + (k[1] / np.cos(phi) ** 2 + k[2] / np.sin(phi) ** 2) * pz2,
    }


# -- derivatives ---------------------------------------------------------------------

def complex_step_grad(fn, z, h=1e-30):
    """Gradient of fn(q, p) by the complex-step method (exact to rounding)."""
    z = np.asarray(z, dtype=complex)
    n = len(z) // 2
    g = np.empty(len(z))
    for i in range(len(z)):
        w = z.copy()
        w[i] += 1j * h
        g[i] = np.imag(fn(list(w[:n]), list(w[n:]))) / h
    return g


def central_grad(fn, z, h=1e-4):
    """Fourth-order central differences."""
    z = np.asarray(z, dtype=float)
    n = len(z) // 2
    g = np.empty(len(z))

    def f(w):
        return float(fn(list(w[:n]), list(w[n:])))

    for i in range(len(z)):
        e = np.zeros(len(z))
        e[i] = h
        g[i] = (-f(z + 2 * e) + 8 * f(z + e) - 8 * f(z - e) + f(z - 2 * e)) / (12 * h)
    return g


def bracket(gf, gg):
    n = len(gf) // 2
    return float(gf[:n] @ gg[n:] - gf[n:] @ gg[:n])


# -- flows ----------------------------------------------------------------------------

def lifted_a_field(k):
    """Hand-differentiated vector field of the family-a geodesic Hamiltonian."""

    def rhs(_, s):
        x, y, z, px, py, pz = s
        V = V_a(x, y, k)
        dVx = k[0] * x - 2 * k[1] / x**3
        dVy = k[0] * y - 2 * k[2] / y**3
        return [px, py, V * pz, -0.5 * pz**2 * dVx, -0.5 * pz**2 * dVy, 0.0]

    return rhs


def reference_flow(rhs, z0, t_end, times=None):
    sol = solve_ivp(rhs, (0.0, t_end), np.asarray(z0, float), method="DOP853",
                    rtol=1e-13, atol=1e-13, t_eval=times, dense_output=times is None)
    return sol


def oscillator(t, q0=1.0, p0=0.0):
    """Closed-form flow of H = (p^2 + q^2)/2."""
    return q0 * np.cos(t) + p0 * np.sin(t), -q0 * np.sin(t) + p0 * np.cos(t)

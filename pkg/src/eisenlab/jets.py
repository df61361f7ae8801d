"""Forward-mode differentiation jets.

``Jet`` carries a value and its gradient with respect to a fixed list of seed
variables. The value may be a float or a 1-D array (one entry per sample); the
gradient then has shape ``(m,)`` or ``(m, N)`` and broadcasting does the rest.

``Jet2`` additionally carries the Hessian. It is scalar-only and is used for
diagnostics that need exact second derivatives (Jacobi identity, Newton
Jacobians, curvature).

The module-level functions (``sqrt``, ``sin``, ...) accept floats, arrays,
``Jet`` or ``Jet2`` so that observables can be written once and evaluated on
any of them.
"""

from __future__ import annotations

from operator import add as _add, neg as _neg, sub as _sub

import numpy as np


class Jet:
    __slots__ = ("value", "grad")
    __array_ufunc__ = None

    def __init__(self, value, grad):
        self.value = value
        self.grad = grad

    @classmethod
    def seed(cls, values, dtype=float) -> list["Jet"]:
        """Seed one jet per entry of ``values``; entry i gets grad = e_i.

        Each entry may be a scalar or an array of N samples.
        """
        m = len(values)
        out = []
        for i, v in enumerate(values):
            v = np.asarray(v, dtype=dtype)
            g = np.zeros((m,) + v.shape)
            g[i] = 1.0
            out.append(cls(v if v.ndim else float(v), g))
        return out

    @classmethod
    def directional(cls, values, directions) -> list["Jet"]:
        """Seed jets whose single gradient slot is a directional derivative."""
        return [cls(float(v), np.array([float(d)])) for v, d in zip(values, directions)]

    def _chain(self, f0, f1, f2=None):
        return Jet(f0, self.grad * f1)

    def __repr__(self):
        return f"Jet({self.value!r}, {self.grad!r})"

    def __neg__(self):
        return Jet(-self.value, -self.grad)

    def __pos__(self):
        return self

    def __add__(self, other):
        if type(other) is Jet:
            return Jet(self.value + other.value, self.grad + other.grad)
        return Jet(self.value + other, self.grad)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Jet:
            return Jet(self.value - other.value, self.grad - other.grad)
        return Jet(self.value - other, self.grad)

    def __rsub__(self, other):
        return Jet(other - self.value, -self.grad)

    def __mul__(self, other):
        if type(other) is Jet:
            return Jet(self.value * other.value,
                       self.grad * other.value + other.grad * self.value)
        return Jet(self.value * other, self.grad * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is Jet:
            v = self.value / other.value
            return Jet(v, (self.grad - other.grad * v) / other.value)
        return Jet(self.value / other, self.grad / other)

    def __rtruediv__(self, other):
        v = other / self.value
        return Jet(v, self.grad * (-v / self.value))

    def __pow__(self, n):
        if n == 2:
            return Jet(self.value * self.value, self.grad * (2.0 * self.value))
        if isinstance(n, (Jet, Jet2)):
            raise TypeError("jet exponents are not supported")
        return Jet(self.value ** n, self.grad * (n * self.value ** (n - 1)))


class Jet2:
    """Second-order scalar jet: value, gradient and Hessian."""

    __slots__ = ("value", "grad", "hess")
    __array_ufunc__ = None

    def __init__(self, value, grad, hess):
        self.value = value
        self.grad = grad
        self.hess = hess

    @classmethod
    def seed(cls, values) -> list["Jet2"]:
        m = len(values)
        out = []
        for i, v in enumerate(values):
            g = np.zeros(m)
            g[i] = 1.0
            out.append(cls(float(v), g, np.zeros((m, m))))
        return out

    def _chain(self, f0, f1, f2):
        g = self.grad
        return Jet2(f0, g * f1, self.hess * f1 + np.multiply.outer(g, g) * f2)

    def __repr__(self):
        return f"Jet2({self.value!r}, {self.grad!r}, ...)"

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __add__(self, other):
        if type(other) is Jet2:
            return Jet2(self.value + other.value, self.grad + other.grad,
                        self.hess + other.hess)
        return Jet2(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Jet2:
            return Jet2(self.value - other.value, self.grad - other.grad,
                        self.hess - other.hess)
        return Jet2(self.value - other, self.grad, self.hess)

    def __rsub__(self, other):
        return Jet2(other - self.value, -self.grad, -self.hess)

    def __mul__(self, other):
        if type(other) is Jet2:
            cross = np.multiply.outer(self.grad, other.grad)
            return Jet2(self.value * other.value,
                        self.grad * other.value + other.grad * self.value,
                        self.hess * other.value + other.hess * self.value
                        + cross + cross.T)
        return Jet2(self.value * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def _reciprocal(self):
        v = self.value
        return self._chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def __truediv__(self, other):
        if type(other) is Jet2:
            return self * other._reciprocal()
        return Jet2(self.value / other, self.grad / other, self.hess / other)

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, n):
        if isinstance(n, (Jet, Jet2)):
            raise TypeError("jet exponents are not supported")
        v = self.value
        if n == 2:
            return self._chain(v * v, 2.0 * v, 2.0)
        return self._chain(v ** n, n * v ** (n - 1), n * (n - 1) * v ** (n - 2))


class Dual:
    """Scalar first-order jet with a tuple gradient.

    Much cheaper than ``Jet`` for a single point with a handful of seeds, which
    is what the integrators evaluate at every stage.
    """

    __slots__ = ("value", "grad")
    __array_ufunc__ = None

    def __init__(self, value, grad):
        self.value = value
        self.grad = grad

    @classmethod
    def seed(cls, values) -> list["Dual"]:
        m = len(values)
        return [cls(float(v), tuple(1.0 if j == i else 0.0 for j in range(m)))
                for i, v in enumerate(values)]

    def _chain(self, f0, f1, f2=None):
        return Dual(float(f0), tuple(map(float(f1).__mul__, self.grad)))

    def __repr__(self):
        return f"Dual({self.value!r}, {self.grad!r})"

    def __neg__(self):
        return Dual(-self.value, tuple(map(_neg, self.grad)))

    def __pos__(self):
        return self

    def __add__(self, other):
        if type(other) is Dual:
            return Dual(self.value + other.value, tuple(map(_add, self.grad, other.grad)))
        return Dual(self.value + other, self.grad)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Dual:
            return Dual(self.value - other.value, tuple(map(_sub, self.grad, other.grad)))
        return Dual(self.value - other, self.grad)

    def __rsub__(self, other):
        return Dual(other - self.value, tuple(map(_neg, self.grad)))

    def __mul__(self, other):
        if type(other) is Dual:
            u, v = self.value, other.value
            return Dual(u * v, tuple(map(_add, map(float(v).__mul__, self.grad),
                                         map(float(u).__mul__, other.grad))))
        return Dual(self.value * other, tuple(map(float(other).__mul__, self.grad)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is Dual:
            return self * other._reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def _reciprocal(self):
        w = 1.0 / self.value
        return self._chain(w, -w * w)

    def __pow__(self, n):
        if isinstance(n, (Jet, Jet2, Dual)):
            raise TypeError("jet exponents are not supported")
        v = self.value
        if n == 2:
            return self._chain(v * v, 2.0 * v)
        return self._chain(v ** n, n * v ** (n - 1))


_JETS = (Jet, Jet2, Dual)


def value_of(u):
    """Strip derivative information."""
    return u.value if isinstance(u, _JETS) else u


def sqrt(u):
    if isinstance(u, _JETS):
        s = np.sqrt(u.value)
        return u._chain(s, 0.5 / s, -0.25 / (s * u.value))
    return np.sqrt(u)


def sin(u):
    if isinstance(u, _JETS):
        s, c = np.sin(u.value), np.cos(u.value)
        return u._chain(s, c, -s)
    return np.sin(u)


def cos(u):
    if isinstance(u, _JETS):
        s, c = np.sin(u.value), np.cos(u.value)
        return u._chain(c, -s, -c)
    return np.cos(u)


def exp(u):
    if isinstance(u, _JETS):
        e = np.exp(u.value)
        return u._chain(e, e, e)
    return np.exp(u)


def log(u):
    if isinstance(u, _JETS):
        v = u.value
        return u._chain(np.log(v), 1.0 / v, -1.0 / (v * v))
    return np.log(u)


def atan(u):
    if isinstance(u, _JETS):
        v = u.value
        d = 1.0 / (1.0 + v * v)
        return u._chain(np.arctan(v), d, -2.0 * v * d * d)
    return np.arctan(u)


def atan2(y, x):
    """Two-argument arctangent; jets get the derivative of atan(y/x)."""
    if not isinstance(y, _JETS) and not isinstance(x, _JETS):
        return np.arctan2(y, x)
    yv, xv = value_of(y), value_of(x)
    phi = np.arctan2(yv, xv)
    if isinstance(y, Jet2) or isinstance(x, Jet2):
        j = atan(y / x) if abs(xv) >= abs(yv) else -atan(x / y)
        j.value = phi
        return j
    # first order: d(phi) = (x dy - y dx) / (x^2 + y^2), valid per sample
    r2 = xv * xv + yv * yv
    if isinstance(y, Dual) or isinstance(x, Dual):
        gy = y.grad if isinstance(y, Dual) else None
        gx = x.grad if isinstance(x, Dual) else None
        m = len(gy if gy is not None else gx)
        gy = gy or (0.0,) * m
        gx = gx or (0.0,) * m
        return Dual(float(phi), tuple((xv * a - yv * b) / r2 for a, b in zip(gy, gx)))
    grad = 0.0
    if isinstance(y, Jet):
        grad = y.grad * (xv / r2)
    if isinstance(x, Jet):
        grad = grad - x.grad * (yv / r2)
    return Jet(phi, grad)

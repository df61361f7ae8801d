"""System specifications: family, tier, coefficients and the z-profile."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any

from ..errors import SpecError
from ..jets import cos, sin

FAMILIES = ("a", "b", "c", "d")
TIERS = ("Euclidean2D", "Geodesic3D", "Potential3D", "PDMGeodesic", "PDMPotential")
POTENTIAL_TIERS = ("Potential3D", "PDMPotential")
PDM_TIERS = ("PDMGeodesic", "PDMPotential")
COEFFICIENTS = ("k1", "k2", "k3", "t1", "t2", "t3", "lam")

DEFAULT_K = (1.0, 0.5, 0.25)
DEFAULT_T = (0.3, 0.2, 0.1)
DEFAULT_LAMBDA = 0.1


@dataclass(frozen=True)
class ZProfile:
    """Smooth function Z(z) entering the lifted potential as V(x, y) Z(z)."""

    kind: str = "Zero"
    params: tuple[float, ...] = ()

    KINDS = ("Zero", "Quadratic", "Cosine", "Polynomial")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise SpecError(f"unknown Z profile kind {self.kind!r}")
        params = tuple(float(v) for v in self.params)
        if not all(math.isfinite(v) for v in params):
            raise SpecError("Z profile parameters must be finite")
        expected = {"Zero": 0, "Quadratic": 1, "Cosine": 2}.get(self.kind)
        if expected is not None and len(params) != expected:
            raise SpecError(f"{self.kind} profile takes {expected} parameter(s), got {len(params)}")
        object.__setattr__(self, "params", params)

    @classmethod
    def zero(cls):
        return cls("Zero")

    @classmethod
    def quadratic(cls, c: float):
        return cls("Quadratic", (c,))

    @classmethod
    def cosine(cls, c: float, omega: float):
        return cls("Cosine", (c, omega))

    @classmethod
    def polynomial(cls, coeffs):
        return cls("Polynomial", tuple(coeffs))

    @property
    def is_zero(self) -> bool:
        return _vanishes(self)

    def __call__(self, z):
        if self.kind == "Zero":
            return 0.0
        if self.kind == "Quadratic":
            return self.params[0] * (z * z)
        if self.kind == "Cosine":
            c, w = self.params
            return c * cos(w * z)
        out = 0.0
        for c in reversed(self.params):
            out = out * z + c
        return out

    def derivative(self, z):
        if self.kind == "Zero":
            return 0.0
        if self.kind == "Quadratic":
            return 2.0 * self.params[0] * z
        if self.kind == "Cosine":
            c, w = self.params
            return -c * w * sin(w * z)
        out = 0.0
        for i in range(len(self.params) - 1, 0, -1):
            out = out * z + i * self.params[i]
        return out

    def to_dict(self) -> dict:
        if self.kind == "Zero":
            return {"kind": "zero"}
        if self.kind == "Quadratic":
            return {"kind": "quadratic", "c": self.params[0]}
        if self.kind == "Cosine":
            return {"kind": "cosine", "c": self.params[0], "omega": self.params[1]}
        return {"kind": "polynomial", "coeffs": list(self.params)}

    @classmethod
    def from_dict(cls, d) -> "ZProfile":
        if d is None:
            return cls.zero()
        if not isinstance(d, dict) or "kind" not in d:
            raise SpecError("z profile must be an object with a 'kind' field")
        kind = str(d["kind"]).lower()
        try:
            if kind == "zero":
                return cls.zero()
            if kind == "quadratic":
                return cls.quadratic(float(d["c"]))
            if kind == "cosine":
                return cls.cosine(float(d["c"]), float(d["omega"]))
            if kind == "polynomial":
                return cls.polynomial([float(c) for c in d["coeffs"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed {kind} z profile: {exc}") from None
        raise SpecError(f"unknown z profile kind {d['kind']!r}")


def _vanishes(z: ZProfile) -> bool:
    if z.kind == "Cosine":
        return z.params[0] == 0.0
    return all(c == 0.0 for c in z.params)


@dataclass(frozen=True)
class Params:
    """Flat numeric parameter bundle used by the formula layer."""

    k1: float
    k2: float
    k3: float
    t1: float
    t2: float
    t3: float
    lam: float
    Z: ZProfile

    def flipped(self, name: str) -> "Params":
        if name not in COEFFICIENTS:
            raise SpecError(f"unknown coefficient {name!r}; expected one of {COEFFICIENTS}")
        return replace(self, **{name: -getattr(self, name)})


@dataclass(frozen=True)
class SystemSpec:
    family: str
    tier: str
    k: tuple[float, float, float] = DEFAULT_K
    t: tuple[float, float, float] = (0.0, 0.0, 0.0)
    lam: float = 0.0
    zfun: ZProfile = field(default_factory=ZProfile.zero)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.tier not in TIERS:
            raise SpecError(f"tier must be one of {TIERS}, got {self.tier!r}")
        k = _triple(self.k, "k")
        t = _triple(self.t, "t")
        lam = float(self.lam)
        if not math.isfinite(lam):
            raise SpecError("lambda must be finite")
        zfun = self.zfun if isinstance(self.zfun, ZProfile) else ZProfile.from_dict(self.zfun)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "zfun", zfun)
        if self.tier not in POTENTIAL_TIERS:
            if any(v != 0.0 for v in t):
                raise SpecError(f"t must be zero in tier {self.tier}")
            if not _vanishes(zfun):
                raise SpecError(f"Z profile must be Zero in tier {self.tier}")
            if zfun.kind != "Zero":
                object.__setattr__(self, "zfun", ZProfile.zero())
        if self.tier not in PDM_TIERS and lam != 0.0:
            raise SpecError(f"lambda must be zero in tier {self.tier}")

    @property
    def ndof(self) -> int:
        return 2 if self.tier == "Euclidean2D" else 3

    @property
    def params(self) -> Params:
        return Params(*self.k, *self.t, self.lam, self.zfun)

    @property
    def label(self) -> str:
        return f"{self.family}/{self.tier}"

    def with_(self, **changes) -> "SystemSpec":
        return replace(self, **changes)

    @classmethod
    def default(cls, family: str, tier: str, lam: float | None = None) -> "SystemSpec":
        """Generic test parameters for any catalog entry."""
        potential = tier in POTENTIAL_TIERS
        pdm = tier in PDM_TIERS
        return cls(
            family, tier, DEFAULT_K,
            DEFAULT_T if potential else (0.0, 0.0, 0.0),
            (DEFAULT_LAMBDA if lam is None else lam) if pdm else 0.0,
            ZProfile.quadratic(0.5) if potential else ZProfile.zero(),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family, "tier": self.tier, "k": list(self.k), "t": list(self.t),
            "lambda": self.lam, "z": self.zfun.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d) -> "SystemSpec":
        if not isinstance(d, dict):
            raise SpecError("system spec must be a JSON object")
        unknown = set(d) - {"family", "tier", "k", "t", "lambda", "z"}
        if unknown:
            raise SpecError(f"unknown spec field(s): {sorted(unknown)}")
        for key in ("family", "tier"):
            if key not in d:
                raise SpecError(f"missing required field {key!r}")
        return cls(
            family=d["family"], tier=d["tier"], k=d.get("k", DEFAULT_K),
            t=d.get("t", (0.0, 0.0, 0.0)), lam=d.get("lambda", 0.0),
            zfun=ZProfile.from_dict(d.get("z")),
        )

    @classmethod
    def from_json(cls, text: str) -> "SystemSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec is not valid JSON: {exc}") from None
        return cls.from_dict(d)


def _triple(v, name):
    try:
        out = tuple(float(x) for x in v)
    except (TypeError, ValueError):
        raise SpecError(f"{name} must be a list of three numbers") from None
    if len(out) != 3:
        raise SpecError(f"{name} must have exactly three entries, got {len(out)}")
    if not all(math.isfinite(x) for x in out):
        raise SpecError(f"{name} entries must be finite")
    return out


@dataclass(frozen=True)
class BracketRelation:
    """A declared relation between observables.

    kind is one of ``"zero"`` ({lhs, rhs} = 0), ``"sum_zero"`` (lhs + rhs = 0),
    ``"half_sum_equals"`` (target = (lhs + rhs)/2), ``"sum_equals"``
    (target = lhs + rhs) or ``"nonzero"`` (negative control: {lhs, rhs} != 0).
    """

    lhs: str
    rhs: str
    kind: str = "zero"
    target: str | None = None

    KINDS = ("zero", "sum_zero", "half_sum_equals", "sum_equals", "nonzero")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise SpecError(f"unknown relation kind {self.kind!r}")
        if self.kind in ("half_sum_equals", "sum_equals") and self.target is None:
            raise SpecError(f"{self.kind} relation needs a target")

    @property
    def names(self) -> tuple[str, ...]:
        return (self.lhs, self.rhs) + ((self.target,) if self.target else ())

    def __str__(self):
        if self.kind == "zero":
            return f"{{{self.lhs}, {self.rhs}}} = 0"
        if self.kind == "nonzero":
            return f"{{{self.lhs}, {self.rhs}}} != 0"
        if self.kind == "sum_zero":
            return f"{self.lhs} + {self.rhs} = 0"
        if self.kind == "half_sum_equals":
            return f"{self.target} = ({self.lhs} + {self.rhs})/2"
        return f"{self.target} = {self.lhs} + {self.rhs}"

"""Third-order jets and the closed-form profile functions built on them.

A :class:`Jet3` carries a value together with its first three derivatives in
``t``.  Fields may be Python floats or numpy arrays of equal shape, so every
profile can be evaluated on a whole grid in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

Number = Union[float, np.ndarray]

#: Denominators with magnitude below this are treated as zero by :func:`jet_div`.
DIV_FLOOR = 1e-300


class JetDivisionError(ZeroDivisionError):
    pass


class DomainError(ValueError):
    """Raised when a profile or family is evaluated outside its open domain."""


@dataclass(frozen=True)
class Jet3:
    v: Number
    d1: Number = 0.0
    d2: Number = 0.0
    d3: Number = 0.0

    @classmethod
    def const(cls, c: Number) -> "Jet3":
        return cls(c, 0.0, 0.0, 0.0)

    @classmethod
    def variable(cls, t: Number) -> "Jet3":
        return cls(t, 1.0, 0.0, 0.0)

    def as_tuple(self) -> tuple:
        return (self.v, self.d1, self.d2, self.d3)

    def __add__(self, other):
        return jet_add(self, _lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return jet_add(self, -_lift(other))

    def __rsub__(self, other):
        return jet_add(_lift(other), -self)

    def __neg__(self):
        return Jet3(-self.v, -self.d1, -self.d2, -self.d3)

    def __mul__(self, other):
        return jet_mul(self, _lift(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return jet_div(self, _lift(other))

    def __rtruediv__(self, other):
        return jet_div(_lift(other), self)


def _lift(x) -> Jet3:
    return x if isinstance(x, Jet3) else Jet3.const(x)


def jet_add(a: Jet3, b: Jet3) -> Jet3:
    return Jet3(a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3)


def jet_mul(a: Jet3, b: Jet3) -> Jet3:
    """Leibniz rule through order three."""
    return Jet3(
        a.v * b.v,
        a.d1 * b.v + a.v * b.d1,
        a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2,
        a.d3 * b.v + 3 * a.d2 * b.d1 + 3 * a.d1 * b.d2 + a.v * b.d3,
    )


def jet_div(a: Jet3, b: Jet3) -> Jet3:
    """Quotient jet ``q = a / b`` obtained by solving ``a = q * b`` order by order."""
    if np.any(np.abs(b.v) < DIV_FLOOR):
        raise JetDivisionError("jet denominator vanishes")
    q0 = a.v / b.v
    q1 = (a.d1 - q0 * b.d1) / b.v
    q2 = (a.d2 - 2 * q1 * b.d1 - q0 * b.d2) / b.v
    q3 = (a.d3 - 3 * q2 * b.d1 - 3 * q1 * b.d2 - q0 * b.d3) / b.v
    return Jet3(q0, q1, q2, q3)


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

_FULL_LINE = (-math.inf, math.inf)


@dataclass(frozen=True)
class Profile:
    """Base class: a positive closed-form function of ``t`` on an open domain."""

    verify_only = False

    def jet(self, t: Number) -> Jet3:
        raise NotImplementedError

    @property
    def domain(self) -> tuple[float, float]:
        return _FULL_LINE

    def to_dict(self) -> dict:
        raise NotImplementedError


def _check_domain(t: Number, domain: tuple[float, float]) -> None:
    lo, hi = domain
    arr = np.asarray(t, dtype=float)
    if not np.all((arr > lo) & (arr < hi)):
        raise DomainError(f"t outside open domain ({lo}, {hi})")


def eval_profile(p: Profile, t: Number) -> Jet3:
    """Evaluate ``p`` at ``t`` (scalar or array), refusing points outside its domain."""
    _check_domain(t, p.domain)
    return p.jet(t)


@dataclass(frozen=True)
class Constant(Profile):
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("Constant profile must be positive")

    def jet(self, t):
        z = np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        return Jet3(self.c + z, z, z, z)

    def to_dict(self):
        return {"kind": "Constant", "c": self.c}


@dataclass(frozen=True)
class SinSq(Profile):
    """``scale * sin^2(omega t + phi)``."""

    omega: float = 1.0
    phi: float = 0.0
    scale: float = 1.0
    dom: tuple[float, float] = _FULL_LINE

    @property
    def domain(self):
        return self.dom

    def jet(self, t):
        u = self.omega * t + self.phi
        s2, c2 = np.sin(2 * u), np.cos(2 * u)
        a, w = self.scale, self.omega
        return Jet3(a * np.sin(u) ** 2, a * w * s2, 2 * a * w**2 * c2, -4 * a * w**3 * s2)

    def to_dict(self):
        return {"kind": "SinSq", "omega": self.omega, "phi": self.phi, "scale": self.scale}


@dataclass(frozen=True)
class CosSq(Profile):
    """``scale * cos^2(omega t + phi)``."""

    omega: float = 1.0
    phi: float = 0.0
    scale: float = 1.0
    dom: tuple[float, float] = _FULL_LINE

    @property
    def domain(self):
        return self.dom

    def jet(self, t):
        u = self.omega * t + self.phi
        s2, c2 = np.sin(2 * u), np.cos(2 * u)
        a, w = self.scale, self.omega
        return Jet3(a * np.cos(u) ** 2, -a * w * s2, -2 * a * w**2 * c2, 4 * a * w**3 * s2)

    def to_dict(self):
        return {"kind": "CosSq", "omega": self.omega, "phi": self.phi, "scale": self.scale}


@dataclass(frozen=True)
class Sine(Profile):
    """First-power entry ``offset + scale * sin(omega t + phi)``."""

    omega: float = 1.0
    phi: float = 0.0
    scale: float = 1.0
    offset: float = 0.0
    dom: tuple[float, float] = _FULL_LINE

    @property
    def domain(self):
        return self.dom

    def jet(self, t):
        u = self.omega * t + self.phi
        s, c = np.sin(u), np.cos(u)
        a, w = self.scale, self.omega
        return Jet3(self.offset + a * s, a * w * c, -a * w**2 * s, -a * w**3 * c)

    def to_dict(self):
        return {"kind": "Sine", "omega": self.omega, "phi": self.phi,
                "scale": self.scale, "offset": self.offset}


@dataclass(frozen=True)
class Cosine(Profile):
    """First-power entry ``offset + scale * cos(omega t + phi)``."""

    omega: float = 1.0
    phi: float = 0.0
    scale: float = 1.0
    offset: float = 0.0
    dom: tuple[float, float] = _FULL_LINE

    @property
    def domain(self):
        return self.dom

    def jet(self, t):
        u = self.omega * t + self.phi
        s, c = np.sin(u), np.cos(u)
        a, w = self.scale, self.omega
        return Jet3(self.offset + a * c, -a * w * s, -a * w**2 * c, a * w**3 * s)

    def to_dict(self):
        return {"kind": "Cosine", "omega": self.omega, "phi": self.phi,
                "scale": self.scale, "offset": self.offset}


@dataclass(frozen=True)
class Exp2(Profile):
    """``scale * exp(2 a t)``."""

    a: float
    scale: float = 1.0

    def jet(self, t):
        e = self.scale * np.exp(2 * self.a * t)
        k = 2 * self.a
        return Jet3(e, k * e, k * k * e, k**3 * e)

    def to_dict(self):
        return {"kind": "Exp2", "a": self.a, "scale": self.scale}


@dataclass(frozen=True)
class PowerLaw(Profile):
    """``c1^2 (c2 + t)^(2q)``, the square of ``c1 (c2 + t)^q``; defined for ``t > -c2``."""

    c1: float
    c2: float
    q: float

    @property
    def domain(self):
        return (-self.c2, math.inf)

    def jet(self, t):
        u = self.c2 + t
        e = 2 * self.q
        k = self.c1**2
        return Jet3(
            k * u**e,
            k * e * u ** (e - 1),
            k * e * (e - 1) * u ** (e - 2),
            k * e * (e - 1) * (e - 2) * u ** (e - 3),
        )

    def to_dict(self):
        return {"kind": "PowerLaw", "c1": self.c1, "c2": self.c2, "q": self.q}


@dataclass(frozen=True)
class Square(Profile):
    """Square of another profile (used for revolution metrics ``phi^2``)."""

    inner: Profile

    @property
    def domain(self):
        return self.inner.domain

    @property
    def verify_only(self):
        return self.inner.verify_only

    def jet(self, t):
        j = self.inner.jet(t)
        return jet_mul(j, j)

    def to_dict(self):
        return {"kind": "Square", "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class Cheeger(Profile):
    """Cheeger-deformed entry ``p / (1 + s p)``."""

    inner: Profile
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.s) and self.s >= 0):
            raise ValueError("Cheeger parameter s must be finite and >= 0")

    @property
    def domain(self):
        return self.inner.domain

    @property
    def verify_only(self):
        return self.inner.verify_only

    def jet(self, t):
        p = self.inner.jet(t)
        if self.s == 0:
            return p
        return jet_div(p, jet_add(Jet3.const(1.0), jet_mul(Jet3.const(self.s), p)))

    def to_dict(self):
        return {"kind": "Cheeger", "s": self.s, "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class UserTable(Profile):
    """Sampled positive profile, interpolated by a quintic spline.

    Verify-only: usable in residual evaluation, never for root classification.
    """

    ts: tuple
    values: tuple
    _spline: object = field(init=False, repr=False, compare=False)

    verify_only = True

    def __post_init__(self):
        from scipy.interpolate import make_interp_spline

        ts = np.asarray(self.ts, dtype=float)
        vs = np.asarray(self.values, dtype=float)
        if ts.ndim != 1 or ts.shape != vs.shape or len(ts) < 6:
            raise ValueError("UserTable needs matching 1-d arrays with >= 6 samples")
        if np.any(vs <= 0):
            raise ValueError("UserTable values must be positive")
        object.__setattr__(self, "_spline", make_interp_spline(ts, vs, k=5))

    @property
    def domain(self):
        return (float(self.ts[0]), float(self.ts[-1]))

    def jet(self, t):
        f = self._spline
        return Jet3(*(f(t, nu)[()] for nu in range(4)))

    def to_dict(self):
        return {"kind": "UserTable", "ts": list(self.ts), "values": list(self.values)}


_KINDS = {
    "Constant": Constant, "SinSq": SinSq, "CosSq": CosSq, "Sine": Sine, "Cosine": Cosine,
    "Exp2": Exp2, "PowerLaw": PowerLaw, "Square": Square, "Cheeger": Cheeger, "UserTable": UserTable,
}


def profile_from_dict(d: dict, dom: tuple[float, float] | None = None) -> Profile:
    d = dict(d)
    cls = _KINDS[d.pop("kind")]
    if "inner" in d:
        d["inner"] = profile_from_dict(d["inner"], dom)
    if cls is UserTable:
        d["ts"], d["values"] = tuple(d["ts"]), tuple(d["values"])
    if dom is not None and "dom" in cls.__dataclass_fields__:
        d["dom"] = tuple(dom)
    return cls(**d)

"""Foliations whose leaves are all biharmonic or r-harmonic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import foliation_doubly_warped, trace_invariants
from .jets import DomainError

PERIODIC_RTOL = 1e-12


def leaf_ode_residual(f: float, df: float, ddf: float, r: int) -> float:
    """``(f')^2 + (r-1) f f''``; zero exactly when the leaf at this time is r-harmonic or minimal."""
    return df * df + (r - 1) * f * ddf


def warped_profile(r: int, c1: float, c2: float, t):
    """``f = c1 (c2+t)^((r-1)/r)`` and its first two derivatives."""
    q = (r - 1) / r
    u = c2 + np.asarray(t, dtype=float)
    return c1 * u**q, c1 * q * u ** (q - 1), c1 * q * (q - 1) * u ** (q - 2)


def warped_leaf_residual(r: int, c1: float, c2: float, t):
    if r < 2 or int(r) != r:
        raise ValueError("r must be an integer >= 2")
    if not (c1 > 0 and c2 > 0):
        raise ValueError("c1 and c2 must be positive")
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    f, df, ddf = warped_profile(r, c1, c2, t)
    return leaf_ode_residual(f, df, ddf, r)


def doubly_warped_interval(n: int, m: int) -> tuple[float, float]:
    half = math.pi / 4 * math.sqrt(m / n)
    return (-half, half)


def doubly_warped_residual(n: int, m: int, t):
    """``n[(f'/f)^2 + f''/f] + m[(h'/h)^2 + h''/h]`` for ``f = e^t``, ``h = sqrt(cos(2t sqrt(n/m)))``."""
    lo, hi = doubly_warped_interval(n, m)
    arr = np.asarray(t, dtype=float)
    if not np.all((arr > lo) & (arr < hi)):
        raise DomainError(f"t outside ({lo}, {hi})")
    w = 2 * math.sqrt(n / m)
    # f = e^t: f'/f = 1, f''/f = 1
    f_term = 2.0
    tan = np.tan(w * arr)
    hl = -0.5 * w * tan                  # h'/h
    hll = -0.5 * w * w - 0.25 * w * w * tan**2  # h''/h
    return n * f_term + m * (hl * hl + hll)


def doubly_warped_minimal_time(n: int, m: int) -> float:
    return 0.5 * math.sqrt(m / n) * math.atan(math.sqrt(n / m))


def doubly_warped_trA(n: int, m: int, t):
    return trace_invariants(foliation_doubly_warped(n, m), t).trA


@dataclass(frozen=True)
class TorusCubic:
    """``psi(t) = a t^3 + b t^2 + c t + d`` on one period of the unit square torus."""

    a: float
    b: float
    c: float
    d: float

    @property
    def proper(self) -> bool:
        return self.a != 0 or self.b != 0

    @property
    def _tol(self) -> float:
        return PERIODIC_RTOL * max(abs(self.a), abs(self.b), abs(self.c), 1.0)

    @property
    def c0_periodic(self) -> bool:
        return abs(self.a + self.b + self.c) <= self._tol

    @property
    def c1_periodic(self) -> bool:
        return self.c0_periodic and abs(3 * self.a + 2 * self.b) <= self._tol

    def __call__(self, t):
        return ((self.a * t + self.b) * t + self.c) * t + self.d

    def jet(self, t) -> tuple[float, float, float, float]:
        """``(psi, psi', psi'', psi''')`` of the polynomial at ``t``."""
        a, b, c = self.a, self.b, self.c
        return (self(t), 3 * a * t * t + 2 * b * t + c, 6 * a * t + 2 * b, 6 * a)

    def fourth_derivative(self, t) -> float:
        return 0.0

    def periodic(self, t):
        """The 1-periodic extension ``psi(t - floor t)``."""
        return self(np.asarray(t) - np.floor(t))

    def one_sided_jets(self) -> tuple[tuple, tuple]:
        """Jets of the periodic extension just left of an integer and just right of it."""
        return self.jet(1.0), self.jet(0.0)


def torus_family(a: float, d: float) -> TorusCubic:
    if a == 0:
        raise ValueError("a = 0 gives straight lines, not proper biharmonic leaves")
    return TorusCubic(2 * a, -3 * a, a, d)


def torus_partition_check(a: float, samples: int = 10_000, seed: int = 0) -> bool:
    """Every sampled point of ``[0,1)^2`` lies on exactly one leaf with ``d`` in ``[0, 1)``.

    Leaves differ by vertical translation, so the leaf through ``(t, y)`` has
    ``d = y - psi_0(t) mod 1``; the check confirms that leaf passes through
    the point and that no other ``d`` in ``[0, 1)`` does.
    """
    base = torus_family(a, 0.0)
    rng = np.random.default_rng(seed)
    t, y = rng.random(samples), rng.random(samples)
    d = np.mod(y - base(t), 1.0)
    d = np.where(d >= 1.0, 0.0, d)
    if np.any((d < 0) | (d >= 1)):
        return False
    on_leaf = np.mod(base(t) + d - y + 0.5, 1.0) - 0.5
    if np.any(np.abs(on_leaf) > 1e-9):
        return False
    # other candidates d + j for integer j != 0 fall outside [0, 1)
    return bool(np.all((d + 1 >= 1) & (d - 1 < 0)))

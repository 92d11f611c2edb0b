"""Orbit residuals, root scanning and classification.

An orbit ``G.gamma(t)`` is biharmonic when ``trace(P^{-1} P'') = 0`` or when it
is minimal, and r-harmonic when the order-r residual vanishes or it is
minimal.  :func:`find_roots` reports the zeros of the chosen residual and
labels each one by the mean-curvature trace there.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .geometry import PtFamily, block_ratios, trace_invariants

POLE_LIMIT = 1e12
DEFAULT_GRID = 4096
DEFAULT_TOL = 1e-12
DEFAULT_CLASS_TOL = 1e-8
TOUCH_RTOL = 1e-9


class Classification(str, Enum):
    MINIMAL = "Minimal"
    PROPER_BIHARMONIC = "ProperBiharmonic"
    PROPER_RHARMONIC = "ProperRHarmonic"


@dataclass(frozen=True)
class Functional:
    """Which residual to scan: ``biharmonic``, ``minimal`` or ``rharmonic`` of order ``r``."""

    kind: str
    r: int = 2

    def __post_init__(self):
        if self.kind not in ("biharmonic", "minimal", "rharmonic"):
            raise ValueError(f"unknown functional {self.kind!r}")
        if self.kind == "rharmonic" and (int(self.r) != self.r or self.r < 2):
            raise ValueError("r-harmonic order must be an integer >= 2")

    @classmethod
    def biharmonic(cls):
        return cls("biharmonic")

    @classmethod
    def minimal(cls):
        return cls("minimal")

    @classmethod
    def rharmonic(cls, r: int):
        return cls("rharmonic", int(r))

    @classmethod
    def for_order(cls, r: int):
        return cls.biharmonic() if r == 2 else cls.rharmonic(r)

    def value(self, fam: PtFamily, t):
        if self.kind == "biharmonic":
            return biharmonic_residual(fam, t)
        if self.kind == "minimal":
            return minimal_residual(fam, t)
        return rharmonic_residual(fam, t, self.r)

    def derivative(self, fam: PtFamily, t):
        return residual_derivative(fam, t, self)

    def label(self) -> str:
        return f"rharmonic(r={self.r})" if self.kind == "rharmonic" else self.kind


@dataclass(frozen=True)
class OrbitSolution:
    t_root: float
    bracket: tuple[float, float]
    residual: float
    trA_at_root: float
    classification: Classification
    order: int = 2
    x_value: float | None = None
    tangential: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bracket"] = list(self.bracket)
        d["classification"] = self.classification.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OrbitSolution":
        d = dict(d)
        d["bracket"] = tuple(d["bracket"])
        d["classification"] = Classification(d["classification"])
        return cls(**d)


def biharmonic_residual(fam: PtFamily, t):
    return trace_invariants(fam, t).trB


def minimal_residual(fam: PtFamily, t):
    return trace_invariants(fam, t).trA


def rharmonic_residual(fam: PtFamily, t, r: int):
    """``beta trB - (2-r) alpha/4 * trace(A (A^2 - 2B))`` with ``A = P^{-1}P'``, ``B = P^{-1}P''``."""
    if int(r) != r or r < 2:
        raise ValueError("r must be an integer >= 2")
    inv = trace_invariants(fam, t)
    return inv.trA2 / 4 * inv.trB + (2 - r) * inv.trA / 8 * (inv.trA3 - 2 * inv.trAB)


def residual_derivative(fam: PtFamily, t, functional: Functional):
    """Exact t-derivative of a residual, using ``a' = b - a^2`` and ``b' = c - a b`` per block."""
    trA = trA2 = trB = trC = trA3 = trAB = trA4 = trA2B = trB2 = trAC = 0.0
    for m, a, b, c in block_ratios(fam, t):
        trA = trA + m * a
        trA2 = trA2 + m * a * a
        trB = trB + m * b
        trC = trC + m * c
        trA3 = trA3 + m * a**3
        trAB = trAB + m * a * b
        trA4 = trA4 + m * a**4
        trA2B = trA2B + m * a * a * b
        trB2 = trB2 + m * b * b
        trAC = trAC + m * a * c
    dA = trB - trA2
    if functional.kind == "minimal":
        return dA
    dB = trC - trAB
    if functional.kind == "biharmonic":
        return dB
    r = functional.r
    dA2 = 2 * trAB - 2 * trA3
    dA3 = 3 * trA2B - 3 * trA4
    dAB = trB2 - 2 * trA2B + trAC
    mixed = trA3 - 2 * trAB
    return (dA2 * trB + trA2 * dB) / 4 + (2 - r) / 8 * (dA * mixed + trA * (dA3 - 2 * dAB))


# ---------------------------------------------------------------------------
# root scanning
# ---------------------------------------------------------------------------


def scan_margin(fam: PtFamily) -> float:
    lo, hi = fam.scan_domain
    return max(1e-9, (hi - lo) / 1e6)


def _bisect(f, lo: float, hi: float, flo: float):
    """Bisect a sign change of ``f`` down to adjacent floats; returns (lo, hi, flo, fhi)."""
    fhi = None
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = float(f(mid))
        if fm == 0.0:
            return mid, mid, 0.0, 0.0
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    if fhi is None:
        fhi = float(f(hi))
    return lo, hi, flo, fhi


def find_roots(
    fam: PtFamily,
    functional: Functional | None = None,
    grid_points: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    class_tol: float = DEFAULT_CLASS_TOL,
) -> list[OrbitSolution]:
    """All zeros of the residual on the scan domain, shrunk by :func:`scan_margin`.

    Sign changes between grid points are bisected to float resolution (the
    final bracket is far narrower than ``tol``).  Zeros where the residual
    touches zero without crossing are located as sign changes of its exact
    derivative and kept when the residual there is below ``1e-9`` times the
    grid-median magnitude.  Cells whose refined point still exceeds
    ``POLE_LIMIT`` are poles and are dropped.
    """
    functional = functional or Functional.biharmonic()
    if grid_points < 16:
        raise ValueError("grid_points must be >= 16")
    if fam.verify_only:
        raise ValueError(f"{fam.name} contains verify-only profiles; roots are not classified")

    eps = scan_margin(fam)
    a, b = fam.scan_domain
    ts = np.linspace(a + eps, b - eps, int(grid_points))
    with np.errstate(all="ignore"):
        fs = np.asarray(functional.value(fam, ts), dtype=float)
        trA_grid = np.asarray(minimal_residual(fam, ts), dtype=float)
    finite = np.isfinite(fs)
    scale = float(np.median(np.abs(fs[finite]))) if finite.any() else 1.0
    a_scale = float(np.median(np.abs(trA_grid[np.isfinite(trA_grid)])))
    touch_tol = TOUCH_RTOL * max(scale, 1e-300)
    pole_tol = max(1e-6, 1e-6 * scale)

    def f(t):
        return functional.value(fam, t)

    def df(t):
        return functional.derivative(fam, t)

    found: list[tuple[float, tuple[float, float], float, bool]] = []

    def add_crossing(lo, hi, flo):
        lo, hi, flo, fhi = _bisect(f, lo, hi, flo)
        t0, f0 = (lo, flo) if abs(flo) <= abs(fhi) else (hi, fhi)
        if abs(f0) <= pole_tol and hi - lo < tol:
            found.append((t0, (lo, hi), f0, False))

    n = len(ts)
    for i in range(n):
        if not finite[i]:
            continue
        if fs[i] == 0.0:
            found.append((float(ts[i]), (float(ts[i]), float(ts[i])), 0.0, False))
            continue
        if i + 1 < n and finite[i + 1] and fs[i + 1] != 0.0 and (fs[i] < 0) != (fs[i + 1] < 0):
            if abs(fs[i]) > POLE_LIMIT and abs(fs[i + 1]) > POLE_LIMIT:
                continue
            add_crossing(float(ts[i]), float(ts[i + 1]), float(fs[i]))

    # touching zeros: local minimum of |f| with no sign change around it
    for i in range(1, n - 1):
        if not (finite[i - 1] and finite[i] and finite[i + 1]):
            continue
        left, mid, right = fs[i - 1], fs[i], fs[i + 1]
        if mid == 0.0 or (left < 0) != (mid < 0) or (right < 0) != (mid < 0):
            continue
        if not (abs(mid) <= abs(left) and abs(mid) < abs(right)):
            continue
        lo, hi = float(ts[i - 1]), float(ts[i + 1])
        dlo, dhi = float(df(lo)), float(df(hi))
        if dlo == 0.0 or dhi == 0.0 or (dlo < 0) == (dhi < 0):
            continue
        slo, shi, _, _ = _bisect(df, lo, hi, dlo)
        ts_ = slo if abs(float(f(slo))) <= abs(float(f(shi))) else shi
        fstar = float(f(ts_))
        if fstar != 0.0 and (fstar < 0) != (mid < 0):
            # two close simple crossings inside one cell pair
            add_crossing(lo, ts_, float(left))
            add_crossing(ts_, hi, fstar)
        elif abs(fstar) <= touch_tol:
            found.append((ts_, (slo, shi), fstar, True))

    found.sort(key=lambda x: x[0])
    merged: list[tuple[float, tuple[float, float], float, bool]] = []
    for item in found:
        if merged and item[0] - merged[-1][0] < max(tol, 1e-12):
            if abs(item[2]) < abs(merged[-1][2]):
                merged[-1] = item
            continue
        merged.append(item)

    order = functional.r if functional.kind == "rharmonic" else 2
    out = []
    for t0, br, f0, touch in merged:
        trA0 = float(minimal_residual(fam, t0))
        out.append(OrbitSolution(
            t_root=float(t0),
            bracket=(float(br[0]), float(br[1])),
            residual=float(f0),
            trA_at_root=trA0,
            classification=classify(trA0, a_scale, functional, class_tol),
            order=order,
            x_value=math.cos(t0) ** 2 if fam.substitution else None,
            tangential=touch,
        ))
    return out


def classify(trA: float, trA_scale: float, functional: Functional,
             class_tol: float = DEFAULT_CLASS_TOL) -> Classification:
    if functional.kind == "minimal" or abs(trA) < class_tol * max(trA_scale, 1e-300):
        return Classification.MINIMAL
    if functional.kind == "rharmonic":
        return Classification.PROPER_RHARMONIC
    return Classification.PROPER_BIHARMONIC


# ---------------------------------------------------------------------------
# closed-form polynomials (coefficients highest degree first, variable x = cos^2 t)
# ---------------------------------------------------------------------------


def cpn_quadratic(n: int, p: int) -> list[float]:
    return [4 * (n + 1), -2 * (n + 2 * p + 3), 2 * p + 1]


def hpn_quadratic(n: int) -> list[float]:
    return [8 * (n + 2), -4 * (n + 5), 3]


def quadric_quadratic(n: int) -> list[float]:
    # (n x - 1)(2 x - 1)
    return [2 * n, -(n + 2), 1]


def quadric_cubic(n: int, r: int) -> list[float]:
    return [r * n, n - 2 - r * (n + 1), r + 2, -1]


def hpn_quartic(n: int, r: int) -> list[float]:
    a4 = (2 * n * n + 11 * n + 5) * r - 6 * (n - 1)
    a3 = -(4 * n * n + 37 * n + 31) * r + 2 * (2 * n + 13) * (n - 1)
    a2 = 5 * (n + 2) * r - 3 * (n - 2)
    a1 = 3 * r + n + 2
    return [16 * a4, 8 * a3, 24 * a2, -24 * a1, 18]


def s7g3_biharmonic_poly() -> list[float]:
    # 2 (4x - 3)^2 x + 1
    return [32, -48, 18, 1]


def polynomial_check(fam: PtFamily, t: float, poly_coeffs) -> float:
    """Evaluate a closed-form polynomial at ``x = cos^2 t``."""
    if not fam.substitution:
        raise ValueError(f"{fam.name} has no x = cos^2 t substitution")
    fam.check(t)
    return float(np.polyval(poly_coeffs, math.cos(t) ** 2))


def polynomial_roots(poly_coeffs, interval=(0.0, 1.0), imag_tol: float = 1e-9) -> list[float]:
    """Real roots of a polynomial inside an open interval, ascending."""
    lo, hi = interval
    out = []
    for z in np.roots(poly_coeffs):
        if abs(z.imag) <= imag_tol * max(1.0, abs(z)) and lo < z.real < hi:
            out.append(float(z.real))
    return sorted(out)

"""Equivariant (k,r)-maps ``g.gamma(t) -> g.gamma(r(t))`` and their biharmonic equation.

The tension field is ``F(t) gamma'(r(t))`` with

    F = r'' + r' trA / 2 - trAr / 2,

and the map is biharmonic when

    G = F'' + F' trA / 2 - F trBr / 2 = 0,

where ``trAr = sum m p'(r)/p(t)`` and ``trBr = sum m p''(r)/p(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import PtFamily, mixed_traces, trace_invariants

SHOOT_RTOL = 1e-10
SHOOT_ATOL = 1e-10


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class DegreeInput:
    j_parity: Parity
    codim_N0_parity: Parity
    codim_N1_parity: Parity
    W_order: int

    def __post_init__(self):
        for name in ("j_parity", "codim_N0_parity", "codim_N1_parity"):
            object.__setattr__(self, name, Parity(getattr(self, name)))
        if self.W_order < 2 or self.W_order % 2:
            raise ValueError("the Weyl group is dihedral: |W| must be even and >= 2")


def admissible_k(j: int, W_order: int) -> int:
    """Winding ``k = j |W| / 2 + 1`` for which the (k,r)-map is smooth."""
    if W_order < 2 or W_order % 2:
        raise ValueError("|W| must be even and >= 2")
    return j * W_order // 2 + 1


def brouwer_degree(d: DegreeInput, k: int) -> int:
    odd0 = d.codim_N0_parity is Parity.ODD
    odd1 = d.codim_N1_parity is Parity.ODD
    if odd0 and odd1:
        return k
    if d.j_parity is Parity.EVEN:
        return 1
    if not odd0 and not odd1 and d.W_order % 4:
        return 0
    if not odd0 and odd1 and d.W_order % 8:
        return -1
    return 1


@dataclass(frozen=True)
class KrMap:
    """A (k,r)-map; ``r_fn(t)`` returns the derivatives ``(r, r', r'', ...)`` at ``t``.

    ``tension_F`` needs three entries, ``bitension_G`` five.
    """

    fam: PtFamily
    k: int
    r_fn: Callable[[float], Sequence[float]]
    verify_only: bool = False

    @classmethod
    def identity(cls, fam: PtFamily) -> "KrMap":
        return cls(fam, 1, lambda t: (t, 1.0, 0.0, 0.0, 0.0))

    @classmethod
    def polynomial(cls, fam: PtFamily, k: int, coeffs: Sequence[float]) -> "KrMap":
        """``r(t) = sum coeffs[i] t^i``."""
        p = np.polynomial.Polynomial(coeffs)
        ders = [p] + [p.deriv(i) for i in range(1, 5)]
        return cls(fam, k, lambda t: tuple(float(d(t)) for d in ders))

    @classmethod
    def from_table(cls, fam: PtFamily, k: int, ts, rs) -> "KrMap":
        """Sampled ``r``; derivatives from a quintic interpolating spline (verify only)."""
        from scipy.interpolate import make_interp_spline

        spl = make_interp_spline(np.asarray(ts, float), np.asarray(rs, float), k=5)
        return cls(fam, k, lambda t: tuple(float(spl(t, nu)) for nu in range(5)), verify_only=True)

    def jets(self, t: float, order: int) -> tuple[float, ...]:
        rs = tuple(self.r_fn(t))
        if len(rs) < order + 1:
            raise ValueError(f"r_fn supplies derivatives up to order {len(rs) - 1}, need {order}")
        return rs


def tension_F(m: KrMap, t: float) -> float:
    r, r1, r2 = m.jets(t, 2)[:3]
    trA = float(trace_invariants(m.fam, t).trA)
    trAr, _ = mixed_traces(m.fam, t, r)
    return r2 + 0.5 * r1 * trA - 0.5 * float(trAr)


def _tension_with_derivatives(m: KrMap, t: float):
    """``(F, F', F'', trA, trBr, M)`` by the chain rule through r and the block jets."""
    r, r1, r2, r3, r4 = m.jets(t, 4)[:5]
    fam = m.fam
    fam.check(t)
    if not fam.extendable:
        fam.check(r)
    A = trBr = M = 0.0
    D0 = D1 = D2 = 0.0
    for b in fam.blocks:
        mult = b.multiplicity
        p = b.profile.jet(t)
        q = b.profile.jet(r)
        a, bb, c = p.d1 / p.v, p.d2 / p.v, p.d3 / p.v
        # profile derivatives at r(t), divided by p(t)
        ar, br, cr = q.d1 / p.v, q.d2 / p.v, q.d3 / p.v
        A += mult * a
        trBr += mult * br
        M += mult * q.d1**2 / (p.v * q.v)
        # grouped so each bracket vanishes identically when r(t) = t
        D0 += mult * (r1 * a - ar)
        D1 += mult * (r2 * a + r1 * (bb - br) + a * (ar - r1 * a))
        D2 += mult * (
            r1 * (c - r1 * cr)
            + 2 * r1 * a * (br - bb)
            + bb * (ar - r1 * a)
            + 2 * a * a * (r1 * a - ar)
            + r3 * a + 2 * r2 * (bb - a * a) - br * r2
        )
    F = r2 + 0.5 * D0
    F1 = r3 + 0.5 * D1
    F2 = r4 + 0.5 * D2
    return F, F1, F2, A, trBr, M


def bitension_G(m: KrMap, t: float) -> float:
    F, F1, F2, A, trBr, _ = _tension_with_derivatives(m, t)
    return F2 + 0.5 * F1 * A - 0.5 * F * trBr


def bitension_split(m: KrMap, t: float) -> float:
    """Rough-Laplacian part plus curvature part, kept separate; equals :func:`bitension_G`."""
    F, F1, F2, A, trBr, M = _tension_with_derivatives(m, t)
    laplacian = F2 + 0.5 * F1 * A - 0.25 * F * M
    curvature = 0.25 * F * (M - 2 * trBr)
    return laplacian + curvature


def tension_derivatives(m: KrMap, t: float) -> tuple[float, float, float]:
    F, F1, F2, *_ = _tension_with_derivatives(m, t)
    return F, F1, F2


# ---------------------------------------------------------------------------
# shooting
# ---------------------------------------------------------------------------


@dataclass
class ShootResult:
    converged: bool
    fam: PtFamily
    k: int
    slope0: float = math.nan
    dF0: float = math.nan
    mismatch: float = math.inf
    iterations: int = 0
    ts: np.ndarray = field(default_factory=lambda: np.empty(0))
    r: np.ndarray = field(default_factory=lambda: np.empty(0))
    rdot: np.ndarray = field(default_factory=lambda: np.empty(0))
    F: np.ndarray = field(default_factory=lambda: np.empty(0))
    message: str = ""

    def rows(self):
        return [(float(a), float(b), float(c), float(d))
                for a, b, c, d in zip(self.ts, self.r, self.rdot, self.F)]


class NoConvergence(RuntimeError):
    def __init__(self, result: ShootResult):
        super().__init__(result.message)
        self.result = result


def _rhs(fam: PtFamily):
    def rhs(t, y):
        r, r1, F, F1 = y
        trA = float(trace_invariants(fam, t).trA)
        trAr, trBr = mixed_traces(fam, t, r)
        return [r1, F - 0.5 * r1 * trA + 0.5 * float(trAr), F1,
                -0.5 * F1 * trA + 0.5 * F * float(trBr)]
    return rhs


def _seed_left(fam: PtFamily, a: float, c: float, eps: float):
    lo = fam.domain[0]
    return lo + eps, [lo + a * eps, a, c * eps, c]


def _seed_right(fam: PtFamily, k: int, b: float, c: float, eps: float):
    lo, hi = fam.domain
    return hi - eps, [lo + k * (hi - lo) - b * eps, b, -c * eps, c]


def _integrate(fam: PtFamily, t0: float, y0, t1: float, dense: bool = False):
    sol = solve_ivp(_rhs(fam), (t0, t1), y0, method="RK45",
                    rtol=SHOOT_RTOL, atol=SHOOT_ATOL, dense_output=dense)
    return sol if sol.status == 0 else None


def shoot_kr(
    fam: PtFamily,
    k: int,
    init_slope_range: tuple[float, float] = (0.5, 1.5),
    tol: float = 1e-8,
    max_iter: int = 40,
    samples: int = 401,
) -> ShootResult:
    """Solve the biharmonic (k,r)-map boundary value problem by shooting.

    Both endpoints are regular singular points.  Near ``t = 0`` the bounded
    solutions are ``r = a t``, ``F = c t``; near ``t = L`` they are
    ``r = kL - b (L - t)``, ``F = -c' (L - t)``.  Each side is seeded at
    distance ``eps = 1e-4 L`` from its endpoint and integrated to the
    midpoint, where ``(r, r', F, F')`` must agree.  Integrating towards a
    singular end would amplify the unbounded branch, so neither trajectory
    does.  Newton steps use a finite-difference Jacobian; raises
    :class:`NoConvergence` if the mismatch stays above ``tol``.
    """
    if not fam.extendable:
        raise ValueError(f"{fam.name} has no analytic extension past its domain; verify only")
    lo, hi = fam.domain
    eps = 1e-4 * (hi - lo)
    mid = 0.5 * (lo + hi)
    result = ShootResult(False, fam, k)

    def mismatch(p):
        a, c, b, c2 = p
        left = _integrate(fam, *_seed_left(fam, a, c, eps), mid)
        right = _integrate(fam, *_seed_right(fam, k, b, c2, eps), mid)
        if left is None or right is None:
            return None
        return left.y[:, -1] - right.y[:, -1]

    best = None
    for a in np.linspace(*init_slope_range, 9):
        p0 = np.array([a, 0.0, a, 0.0])
        res0 = mismatch(p0)
        if res0 is not None and (best is None or np.linalg.norm(res0) < best[1]):
            best = (p0, float(np.linalg.norm(res0)))
    if best is None:
        result.message = "integration failed for every starting slope"
        raise NoConvergence(result)
    p = best[0]
    res = mismatch(p)
    it = 0
    while it < max_iter and np.linalg.norm(res) >= tol:
        it += 1
        J = np.empty((4, 4))
        ok = True
        for j in range(4):
            h = 1e-7 * max(1.0, abs(p[j]))
            dp = p.copy()
            dp[j] += h
            rj = mismatch(dp)
            if rj is None:
                ok = False
                break
            J[:, j] = (rj - res) / h
        if not ok:
            break
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-4:
            trial = p + lam * step
            rt = mismatch(trial)
            if rt is not None and np.linalg.norm(rt) < np.linalg.norm(res):
                p, res = trial, rt
                break
            lam /= 2
        else:
            break
    result.iterations = it
    result.slope0, result.dF0 = float(p[0]), float(p[1])
    result.mismatch = float(np.linalg.norm(res))
    if result.mismatch >= tol:
        result.message = f"no convergence after {it} iterations (mismatch {result.mismatch:.3e})"
        raise NoConvergence(result)
    left = _integrate(fam, *_seed_left(fam, p[0], p[1], eps), mid, dense=True)
    right = _integrate(fam, *_seed_right(fam, k, p[2], p[3], eps), mid, dense=True)
    ts = np.linspace(lo + eps, hi - eps, samples)
    y = np.where(ts <= mid, left.sol(np.minimum(ts, mid)), right.sol(np.maximum(ts, mid)))
    result.ts, result.r, result.rdot, result.F = ts, y[0], y[1], y[2]
    result.converged = True
    result.message = "converged"
    return result


def verify_table(fam: PtFamily, k: int, ts, rs, points: int = 50) -> list[dict]:
    """Tension and bitension of a sampled ``r`` at interior points; no classification."""
    m = KrMap.from_table(fam, k, ts, rs)
    ts = np.asarray(ts, float)
    inner = np.linspace(ts[0], ts[-1], points + 2)[1:-1]
    out = []
    for t in inner:
        F, F1, F2 = tension_derivatives(m, float(t))
        out.append({"t": float(t), "F": F, "G": bitension_G(m, float(t))})
    return out

"""Normal stability of biharmonic orbits.

For a normal variation ``f T`` the bienergy Hessian is

    int (Delta f)^2 + 4 |S_t grad f|^2 + (1/4) trA trC f^2,

so a negative ``trA * trC`` already makes the orbit unstable (take ``f``
constant).  The gradient term needs spectral data in general; here it is
either dropped (lower bound) or evaluated exactly for umbilic orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import PtFamily, block_ratios, hpn, trace_invariants

NULLITY_ATOL = 1e-12
# trA below this fraction of sum m|p'/p| is cancellation noise, i.e. a minimal orbit
MINIMAL_RTOL = 1e-12


@dataclass(frozen=True)
class StabilityReport:
    t: float
    trA: float
    trC: float
    criterion: float
    hessian_const: float
    unstable: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "t": self.t, "trA": self.trA, "trC": self.trC, "criterion": self.criterion,
            "hessian_const": self.hessian_const, "unstable": self.unstable, "notes": list(self.notes),
        }


@dataclass(frozen=True)
class IndexNullity:
    index: int
    nullity: int
    k_max: int


def stability_report(fam: PtFamily, t: float) -> StabilityReport:
    inv = trace_invariants(fam, t)
    trA, trC = float(inv.trA), float(inv.trC)
    if abs(trA) <= MINIMAL_RTOL * sum(m * abs(float(a)) for m, a, _, _ in block_ratios(fam, t)):
        trA = 0.0
    criterion = trA * trC
    notes = []
    if abs(float(inv.trB)) > 1e-6:
        notes.append(f"trB = {float(inv.trB):.3e}: t is not a biharmonic orbit")
    return StabilityReport(float(t), trA, trC, criterion, criterion / 4, criterion < 0, notes)


def hessian_lower_bound(fam: PtFamily, t: float, mu: float) -> float:
    """``mu^2 + trA trC / 4``: the Hessian on a ``mu``-eigenfunction without the gradient term."""
    if mu < 0:
        raise ValueError("eigenvalue mu must be >= 0")
    return mu * mu + stability_report(fam, t).hessian_const


def ho_eigenvalue_bound(ricci_lower: float, dim_factor: int, max_mean_curv: float) -> float:
    """Strict lower bound ``(k - dim_factor * max|H|) / 2`` for the first nonzero eigenvalue.

    ``dim_factor`` is whatever multiple of the mean curvature the caller's
    normalisation requires.
    """
    if not ricci_lower > 0:
        raise ValueError("Ricci lower bound must be positive")
    return (ricci_lower - dim_factor * max_mean_curv) / 2


def sphere_multiplicity(k: int, n: int) -> int:
    """Multiplicity of the k-th Laplace eigenvalue on the round ``S^n``."""
    if k < 1 or n < 1:
        raise ValueError("need k >= 1 and n >= 1")
    num = (n + 2 * k - 1) * math.factorial(n + k - 2)
    den = math.factorial(k) * math.factorial(n - 1)
    q, rem = divmod(num, den)
    assert rem == 0
    return q


def warped_index_nullity(n: int, t: float, atol: float = NULLITY_ATOL) -> IndexNullity:
    """Normal index and nullity of the leaf ``S^n(sqrt t)`` in ``dt^2 + t g_{S^n}``.

    Mode ``k`` has eigenvalue ``k(n+k-1)/t`` and contributes to the index when
    ``t k (n+k-1) < 1``; equality adds it to the nullity, which always counts
    the constants.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    index, nullity, k_max = 0, 1, 0
    k = 1
    while True:
        v = t * k * (n + k - 1)
        if v < 1 - atol:
            index += sphere_multiplicity(k, n)
            k_max = k
        elif abs(v - 1) <= atol:
            nullity += sphere_multiplicity(k, n)
        else:
            break
        k += 1
    return IndexNullity(index, nullity, k_max)


def warped_mode_hessian(n: int, t: float, k: int) -> float:
    """Exact Hessian factor ``mu (mu - t^-2)`` on the k-th eigenspace of ``S^n(sqrt t)``."""
    mu = k * (n + k - 1) / t
    return mu * (mu - t**-2)


def hpn_biharmonic_root(n: int) -> float:
    """``x_-``, the smaller root of ``8(n+2)x^2 - 4(n+5)x + 3``."""
    return (n + 5 - math.sqrt(n * n + 4 * n + 13)) / (4 * (n + 2))


def hpn_asymptotics_probe(n: int) -> tuple[float, float]:
    """``(sqrt(n) trA, trC / sqrt(n))`` at the tube ``t = arccos sqrt(x_-)`` in HP^n."""
    if n < 2:
        raise ValueError("n >= 2")
    t = math.acos(math.sqrt(hpn_biharmonic_root(n)))
    inv = trace_invariants(hpn(n), t)
    return math.sqrt(n) * float(inv.trA), float(inv.trC) / math.sqrt(n)


def hpn_first_eigenvalue_bound(n: int) -> float:
    """``2(n+2) + trA/4`` from the Einstein constant ``4(n+2)`` and ``max|H| = |trA|/2``."""
    t = math.acos(math.sqrt(hpn_biharmonic_root(n)))
    trA = float(trace_invariants(hpn(n), t).trA)
    return ho_eigenvalue_bound(4 * (n + 2), 1, abs(trA) / 2)


def hpn_index_one_threshold(n_max: int = 200) -> int | None:
    """Smallest ``n`` from which ``mu_1^2 + trA trC / 4 > 0`` holds for every n up to ``n_max``.

    Past that ``n`` only the constant normal variation can lower the bienergy,
    so the normal index is 1 (the constant direction is unstable there).
    """
    ok = []
    for n in range(2, n_max + 1):
        t = math.acos(math.sqrt(hpn_biharmonic_root(n)))
        mu1 = hpn_first_eigenvalue_bound(n)
        ok.append(mu1 > 0 and hessian_lower_bound(hpn(n), t, mu1) > 0)
    ok_arr = np.array(ok)
    if not ok_arr[-1]:
        return None
    bad = np.flatnonzero(~ok_arr)
    return int(bad[-1] + 3) if bad.size else 2

"""Reproduction checks for every worked example, shared by ``coh1 verify`` and the test suite.

Each check returns a list of failure messages; an empty list is a pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import geometry as geo
from .cheeger import cheeger_deform
from .foliation import (
    doubly_warped_interval,
    doubly_warped_minimal_time,
    doubly_warped_residual,
    torus_family,
    torus_partition_check,
    warped_leaf_residual,
)
from .jets import Cheeger, PowerLaw, Sine
from .krmaps import (
    DegreeInput,
    KrMap,
    NoConvergence,
    bitension_G,
    brouwer_degree,
    shoot_kr,
    tension_F,
)
from .solve import (
    Classification,
    Functional,
    biharmonic_residual,
    cpn_quadratic,
    find_roots,
    hpn_quadratic,
    hpn_quartic,
    polynomial_roots,
    quadric_cubic,
)
from .stability import (
    hpn_asymptotics_probe,
    sphere_multiplicity,
    stability_report,
    warped_index_nullity,
)

PI = math.pi
PROPER = (Classification.PROPER_BIHARMONIC, Classification.PROPER_RHARMONIC)


@dataclass(frozen=True)
class Check:
    number: int
    name: str
    tags: tuple[str, ...]
    run: Callable[[], list[str]]

    def matches(self, pattern: str | None) -> bool:
        if not pattern:
            return True
        p = pattern.strip().lower()
        if p.isdigit():
            return int(p) == self.number
        return p in self.name.lower() or any(p in t for t in self.tags)


CHECKS: list[Check] = []


def check(number: int, name: str, *tags: str):
    def deco(fn):
        CHECKS.append(Check(number, name, tags, fn))
        return fn
    return deco


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) < tol


def _match_sets(got, want, tol) -> bool:
    got, want = sorted(got), sorted(want)
    return len(got) == len(want) and all(abs(g - w) < tol for g, w in zip(got, want))


# ---------------------------------------------------------------------------


@check(1, "sphere biharmonic root at pi/4", "sphere", "biharmonic")
def _sphere():
    errs = []
    for n in range(2, 9):
        roots = find_roots(geo.sphere(n))
        if len(roots) != 1:
            errs.append(f"sphere({n}): {len(roots)} roots")
            continue
        r = roots[0]
        if not _close(r.t_root, PI / 4, 1e-10) or r.classification not in PROPER:
            errs.append(f"sphere({n}): t={r.t_root!r} {r.classification.value}")
    return errs


@check(2, "Clifford hypersurfaces", "clifford", "biharmonic")
def _clifford():
    errs = []
    for n, k in [(4, 1), (5, 2), (6, 3)]:
        roots = find_roots(geo.clifford(n, k))
        t_min = math.atan(math.sqrt((n - k) / k))
        want = sorted({PI / 4, t_min}, key=float)
        want = [w for i, w in enumerate(want) if i == 0 or abs(w - want[i - 1]) > 1e-9]
        got = [r.t_root for r in roots]
        if not _match_sets(got, want, 1e-10):
            errs.append(f"clifford({n},{k}): roots {got} != {want}")
            continue
        for r in roots:
            at_quarter = _close(r.t_root, PI / 4, 1e-10)
            should_be_proper = at_quarter and n != 2 * k
            is_proper = r.classification in PROPER
            if is_proper != should_be_proper:
                errs.append(f"clifford({n},{k}): t={r.t_root:.12f} classified {r.classification.value}")
    return errs


@check(3, "CP^n tubes match closed-form quadratic", "cpn", "biharmonic")
def _cpn():
    errs = []
    for n, p in [(2, 1), (3, 1), (3, 2)]:
        got = [r.x_value for r in find_roots(geo.cpn(n, p))]
        want = polynomial_roots(cpn_quadratic(n, p))
        if not _match_sets(got, want, 1e-10):
            errs.append(f"cpn({n},{p}): x roots {got} != {want}")
    if not _close(geo.cpn_eta_sq(2, 1), 1.0, 1e-15):
        errs.append("cpn(2,1): eta^2 != 1")
    return errs


@check(4, "HP^n tubes match closed-form quadratic", "hpn", "biharmonic")
def _hpn():
    errs = []
    for n in (2, 3, 5):
        roots = find_roots(geo.hpn(n))
        got = [r.x_value for r in roots]
        want = polynomial_roots(hpn_quadratic(n))
        if len(roots) != 2 or not _match_sets(got, want, 1e-10):
            errs.append(f"hpn({n}): x roots {got} != {want}")
        if any(r.classification not in PROPER for r in roots):
            errs.append(f"hpn({n}): a root is not proper")
        x_min = 3 / (2 * (2 * n + 1))
        if any(abs(x - x_min) < 1e-6 for x in got):
            errs.append(f"hpn({n}): minimal orbit x={x_min} among biharmonic roots")
        mins = find_roots(geo.hpn(n), Functional.minimal())
        if len(mins) != 1 or not _close(mins[0].x_value, x_min, 1e-10):
            errs.append(f"hpn({n}): minimal locus {[m.x_value for m in mins]} != [{x_min}]")
        if n == 2 and not (roots and _close(min(got), 1 / 8, 1e-12)):
            errs.append(f"hpn(2): x_- = {min(got) if got else None} != 1/8")
    return errs


@check(5, "complex quadric roots 1/n and 1/2", "quadric", "biharmonic")
def _quadric():
    errs = []
    for n in (3, 4, 5):
        roots = find_roots(geo.quadric(n))
        if len(roots) != 2:
            errs.append(f"quadric({n}): {len(roots)} roots")
            continue
        lo, hi = sorted(roots, key=lambda r: r.x_value)
        if not (_close(lo.x_value, 1 / n, 1e-10) and lo.classification is Classification.MINIMAL):
            errs.append(f"quadric({n}): x={lo.x_value} {lo.classification.value}")
        if not (_close(hi.x_value, 0.5, 1e-10) and hi.classification in PROPER):
            errs.append(f"quadric({n}): x={hi.x_value} {hi.classification.value}")
    return errs


@check(6, "SU(3) and S2xS2/SO(3) have no biharmonic orbits", "su3", "s2xs2", "null")
def _null_cases():
    errs = []
    for fam in (geo.su3(), geo.s2xs2_so3()):
        roots = find_roots(fam)
        if roots:
            errs.append(f"{fam.name}: unexpected roots {[r.t_root for r in roots]}")
    ts = np.linspace(1e-3, PI / 2 - 1e-3, 200)
    dev = float(np.max(np.abs(biharmonic_residual(geo.s2xs2_so3(), ts) + 2)))
    if dev >= 1e-12:
        errs.append(f"s2xs2_so3: trB deviates from -2 by {dev:.2e}")
    return errs


@check(7, "Cheeger-deformed S^7 with three principal curvatures", "cheeger", "s7g3")
def _s7g3():
    errs = []
    base = geo.s7g3()
    if find_roots(base):
        errs.append("s7g3 at s=0 has biharmonic roots")
    roots = find_roots(cheeger_deform(base, 1.0))
    inside = [r for r in roots if PI / 6 < r.t_root < PI / 4]
    if not inside:
        errs.append(f"s7g3 at s=1: no root in (pi/6, pi/4); roots {[r.t_root for r in roots]}")
    for r in inside:
        if r.classification not in PROPER or abs(r.residual) >= 1e-12:
            errs.append(f"s7g3 at s=1: root {r.t_root} {r.classification.value} residual {r.residual:.2e}")
    for s in (0.0, 0.5, 1.0, 2.0):
        mins = find_roots(cheeger_deform(base, s), Functional.minimal())
        if len(mins) != 1 or not _close(mins[0].t_root, PI / 6, 1e-10):
            errs.append(f"s7g3 at s={s}: minimal locus {[m.t_root for m in mins]}")
    return errs


@check(8, "Cheeger-deformed SU(3)", "cheeger", "su3")
def _su3():
    errs = []
    fam = cheeger_deform(geo.su3(), 1.0)
    val = float(biharmonic_residual(fam, PI / 6))
    if not _close(val, -1.0, 1e-12):
        errs.append(f"su3 at s=1: trB(pi/6) = {val!r}")
    if not [r for r in find_roots(fam) if 0 < r.t_root < PI / 6 and r.classification in PROPER]:
        errs.append("su3 at s=1: no proper root in (0, pi/6)")
    return errs


@check(9, "Cheeger-deformed S2xS2 with diagonal SU(2)", "cheeger", "s2xs2", "su2")
def _su2():
    errs = []
    fam = cheeger_deform(geo.s2xs2_su2(), 1.0)
    if not [r for r in find_roots(fam) if 0 < r.t_root < PI / 8 and r.classification in PROPER]:
        errs.append("s2xs2_su2 at s=1: no proper root in (0, pi/8)")
    mins = find_roots(fam, Functional.minimal())
    if len(mins) != 1 or not _close(mins[0].t_root, PI / 8, 1e-10):
        errs.append(f"s2xs2_su2 at s=1: minimal locus {[m.t_root for m in mins]}")
    return errs


@check(10, "quadric instability criterion", "stability", "quadric")
def _stability():
    errs = []
    for n in (3, 4, 5):
        rep = stability_report(geo.quadric(n), PI / 4)
        if not _close(rep.criterion, -16 * (n - 2) ** 2, 1e-9) or not rep.unstable:
            errs.append(f"quadric({n}): criterion {rep.criterion!r}, unstable={rep.unstable}")
    return errs


@check(11, "HP^n asymptotics at n = 10^6", "stability", "hpn", "asymptotics")
def _asymptotics():
    a, c = hpn_asymptotics_probe(10**6)
    errs = []
    if abs(a / (-12 * math.sqrt(3)) - 1) >= 0.02:
        errs.append(f"sqrt(n) trA = {a}")
    if abs(c / (48 * math.sqrt(3)) - 1) >= 0.02:
        errs.append(f"trC / sqrt(n) = {c}")
    return errs


@check(12, "r-harmonic spheres sin^2 t = 1/r", "rharmonic", "sphere")
def _rsphere():
    errs = []
    for n in (2, 3, 5):
        for r in range(2, 7):
            roots = find_roots(geo.sphere(n), Functional.rharmonic(r))
            want = math.asin(1 / math.sqrt(r))
            if len(roots) != 1 or not _close(roots[0].t_root, want, 1e-10):
                errs.append(f"sphere({n}) r={r}: roots {[x.t_root for x in roots]} != {want}")
    return errs


@check(13, "quadric and Clifford r-harmonic equivalence", "rharmonic", "quadric", "clifford")
def _rquadric():
    errs = []
    for n in (3, 4, 5):
        for r in range(2, 7):
            fn = Functional.rharmonic(r)
            q = find_roots(geo.quadric(n), fn)
            c = find_roots(geo.clifford(n, 1), fn)
            if not _match_sets([x.t_root for x in q], [x.t_root for x in c], 1e-10):
                errs.append(f"n={n} r={r}: quadric {[x.t_root for x in q]} vs clifford {[x.t_root for x in c]}")
            proper = [x.x_value for x in q if x.classification in PROPER]
            want = polynomial_roots(quadric_cubic(n, r))
            if not _match_sets(proper, want, 1e-10):
                errs.append(f"n={n} r={r}: proper x {proper} != cubic roots {want}")
    return errs


@check(14, "HP^n r-harmonic quartic", "rharmonic", "hpn")
def _rhpn():
    errs = []
    for n in (2, 3, 5):
        x_min = 3 / (2 * (2 * n + 1))
        for r in (2, 3, 4):
            P = hpn_quartic(n, r)
            if np.polyval(P, 0.0) != 18 or not np.polyval(P, x_min) < 0:
                errs.append(f"n={n} r={r}: sign conditions fail")
            qroots = polynomial_roots(P)
            fn = Functional.for_order(r) if r > 2 else Functional.rharmonic(2)
            low = [x.x_value for x in find_roots(geo.hpn(n), fn) if 0 < x.x_value < x_min]
            if len(low) != 1 or not any(abs(low[0] - z) < 1e-8 for z in qroots):
                errs.append(f"n={n} r={r}: solver x {low} vs quartic {qroots}")
        if not _match_sets(polynomial_roots(hpn_quartic(n, 2)), polynomial_roots(hpn_quadratic(n)), 1e-8):
            errs.append(f"n={n}: r=2 quartic roots differ from the biharmonic quadratic")
    return errs


@check(15, "polyharmonic foliations", "foliation", "torus", "warped")
def _foliations():
    errs = []
    rng = np.random.default_rng(15)
    ts = np.linspace(0.0, 10.0, 50)
    for r in (2, 3, 4, 5):
        c1, c2 = rng.uniform(0.1, 5.0, 2)
        worst = float(np.max(np.abs(warped_leaf_residual(r, c1, c2, ts))))
        if worst >= 1e-12:
            errs.append(f"warped r={r} c1={c1:.3f} c2={c2:.3f}: residual {worst:.2e}")
    for n, m in [(1, 1), (2, 3), (3, 2)]:
        lo, hi = doubly_warped_interval(n, m)
        grid = np.linspace(lo, hi, 52)[1:-1]
        worst = float(np.max(np.abs(doubly_warped_residual(n, m, grid))))
        if worst >= 1e-12:
            errs.append(f"doubly warped ({n},{m}): residual {worst:.2e}")
        mins = find_roots(geo.foliation_doubly_warped(n, m), Functional.minimal())
        t_star = doubly_warped_minimal_time(n, m)
        if len(mins) != 1 or not _close(mins[0].t_root, t_star, 1e-10):
            errs.append(f"doubly warped ({n},{m}): minimal {[x.t_root for x in mins]} != {t_star}")
    if not _close(doubly_warped_minimal_time(1, 1), PI / 8, 1e-15):
        errs.append("doubly warped (1,1): t* != pi/8")
    for a in (1.0, 0.37):
        fam = torus_family(a, 0.25)
        if not (fam.c0_periodic and fam.c1_periodic and fam.proper):
            errs.append(f"torus a={a}: periodicity conditions fail")
        if not torus_partition_check(a, 10_000):
            errs.append(f"torus a={a}: partition check fails")
    return errs


def _brute_index_nullity(n: int, t: float, kmax: int = 1000, atol: float = 1e-12):
    index, nullity = 0, 1
    for k in range(1, kmax + 1):
        v = t * k * (n + k - 1)
        if v < 1 - atol:
            index += sphere_multiplicity(k, n)
        elif abs(v - 1) <= atol:
            nullity += sphere_multiplicity(k, n)
    return index, nullity


@check(16, "warped foliation index and nullity", "stability", "index", "foliation")
def _index():
    errs = []
    rng = np.random.default_rng(16)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        t = float(rng.uniform(0.01, 3.0))
        res = warped_index_nullity(n, t)
        if (res.index, res.nullity) != _brute_index_nullity(n, t):
            errs.append(f"(n={n}, t={t}): {res} vs oracle {_brute_index_nullity(n, t)}")
    for (n, t), want in {(2, 0.1): (8, 1), (2, 0.5): (0, 4), (2, 2.0): (0, 1)}.items():
        res = warped_index_nullity(n, t)
        if (res.index, res.nullity) != want:
            errs.append(f"(n={n}, t={t}): ({res.index}, {res.nullity}) != {want}")
    return errs


@check(17, "(k,r)-maps: identity, shooting, Brouwer degree", "krmap", "degree", "shooting")
def _krmaps():
    errs = []
    for fam in (geo.sphere(3), geo.clifford(4, 1), geo.quadric(3)):
        m = KrMap.identity(fam)
        lo, hi = fam.domain
        for t in np.linspace(lo, hi, 52)[1:-1]:
            F, G = tension_F(m, float(t)), bitension_G(m, float(t))
            if abs(F) >= 1e-12 or abs(G) >= 1e-12:
                errs.append(f"{fam.name}: identity F={F:.2e} G={G:.2e} at t={t:.4f}")
                break
    try:
        res = shoot_kr(geo.sphere(3), 1)
        sup = float(np.max(np.abs(res.r - res.ts)))
        if sup >= 1e-4:
            errs.append(f"shooting sphere(3), k=1: sup |r - t| = {sup:.2e}")
    except NoConvergence as exc:
        errs.append(f"shooting sphere(3), k=1: {exc}")
    branches = {
        ("even", "odd", "odd", 2): 3, ("even", "even", "odd", 2): 1,
        ("odd", "odd", "odd", 4): 3, ("odd", "even", "even", 6): 0,
        ("odd", "even", "odd", 6): -1, ("odd", "even", "even", 4): 1,
        ("odd", "even", "odd", 8): 1, ("odd", "odd", "even", 6): 1,
    }
    for (j, c0, c1, w), want in branches.items():
        got = brouwer_degree(DegreeInput(j, c0, c1, w), 3)
        if got != want:
            errs.append(f"degree(j {j}, codims {c0}/{c1}, |W|={w}) = {got} != {want}")
    return errs


def _fd_jet(p, t: float, h: float):
    f = [float(p.jet(t + i * h).v) for i in range(-3, 4)]
    d1 = (f[1] - 8 * f[2] + 8 * f[4] - f[5]) / (12 * h)
    d2 = (-f[1] + 16 * f[2] - 30 * f[3] + 16 * f[4] - f[5]) / (12 * h * h)
    d3 = (f[0] / 8 - f[1] + 13 * f[2] / 8 - 13 * f[4] / 8 + f[5] - f[6] / 8) / h**3
    return d1, d2, d3


def catalog_profiles():
    """(label, profile, domain) for every profile appearing in a catalog family."""
    fams = [geo.sphere(3), geo.clifford(5, 2), geo.cpn(3, 1), geo.hpn(3), geo.quadric(4),
            geo.su3(), geo.s2xs2_so3(), geo.s7g3(), geo.s9g4(), geo.s13g6(), geo.s2xs2_su2(),
            geo.revolution(Sine(offset=2.0), (0.0, 6.0)),
            geo.warped(PowerLaw(1.3, 0.4, 0.75), 2, (0.0, 5.0)),
            geo.foliation_doubly_warped(2, 3)]
    fams += [cheeger_deform(f, 0.7) for f in fams[:11]]
    out = []
    for fam in fams:
        for i, b in enumerate(fam.blocks):
            out.append((f"{fam.name}[{i}]{'*' if isinstance(b.profile, Cheeger) else ''}",
                        b.profile, fam.domain))
    return out


@check(18, "profile jets against finite differences", "jets")
def _jets():
    errs = []
    rng = np.random.default_rng(18)
    for label, p, (lo, hi) in catalog_profiles():
        h = 4e-3  # balances O(h^4) truncation against eps/h^3 roundoff in the third derivative
        margin = 4 * h + 1e-3 * (hi - lo)
        worst = 0.0
        for t in rng.uniform(lo + margin, hi - margin, 100):
            j = p.jet(float(t))
            scale = max(abs(float(j.v)), abs(float(j.d1)), abs(float(j.d2)), abs(float(j.d3)))
            for exact, approx in zip((j.d1, j.d2, j.d3), _fd_jet(p, float(t), h)):
                worst = max(worst, abs(float(exact) - approx) / scale)
        if worst >= 1e-6:
            errs.append(f"{label}: relative derivative error {worst:.2e}")
        if isinstance(p, Cheeger):
            ts = rng.uniform(lo + margin, hi - margin, 50)
            got, want = Cheeger(p.inner, 0.0).jet(ts).as_tuple(), p.inner.jet(ts).as_tuple()
            if not all(np.array_equal(x, y) for x, y in zip(got, want)):
                errs.append(f"{label}: Cheeger s=0 is not the identity")
    return errs


def run_checks(pattern: str | None = None):
    """Run matching checks; yields ``(check, failures)``."""
    for c in sorted(CHECKS, key=lambda c: c.number):
        if c.matches(pattern):
            try:
                failures = c.run()
            except Exception as exc:  # a crash is a failed check, reported by name
                failures = [f"{type(exc).__name__}: {exc}"]
            yield c, failures

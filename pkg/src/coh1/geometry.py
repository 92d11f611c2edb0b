"""Diagonal cohomogeneity-one metrics, the example catalog and trace invariants.

A family stores the diagonal entries ``p_i(t) = f_i(t)^2`` of the orbit metric
endomorphism together with the dimension ``m_i`` of each block.  Every scalar
the solvers need is a weighted sum over blocks of the ratios

    a_i = p_i'/p_i,   b_i = p_i''/p_i,   c_i = p_i'''/p_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .jets import (
    Constant,
    CosSq,
    Cosine,
    DomainError,
    Exp2,
    Jet3,
    PowerLaw,
    Profile,
    Sine,
    SinSq,
    Square,
    profile_from_dict,
)

X_COS2 = "x = cos^2 t"


@dataclass(frozen=True)
class Block:
    profile: Profile
    multiplicity: int

    def __post_init__(self):
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValueError("block multiplicity must be a positive integer")


@dataclass(frozen=True)
class PtFamily:
    """A diagonal family ``P_t`` on an open interval of the normal geodesic.

    ``search_domain`` is the part of the domain scanned for roots.  It differs
    from ``domain`` only when a reflection of the normal geodesic maps orbits
    onto congruent orbits (the round sphere).  ``extendable`` marks families
    whose entries continue analytically past the domain, which is what the
    (k,r)-map shooting solver requires.
    """

    name: str
    blocks: tuple[Block, ...]
    domain: tuple[float, float]
    params: dict = field(default_factory=dict)
    substitution: str | None = None
    search_domain: tuple[float, float] | None = None
    extendable: bool = False

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError("empty domain")
        if not self.blocks:
            raise ValueError("family needs at least one block")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def dimension(self) -> int:
        return sum(b.multiplicity for b in self.blocks)

    @property
    def scan_domain(self) -> tuple[float, float]:
        return self.search_domain or self.domain

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    @property
    def verify_only(self) -> bool:
        return any(b.profile.verify_only for b in self.blocks)

    def check(self, t) -> None:
        lo, hi = self.domain
        arr = np.asarray(t, dtype=float)
        if not np.all((arr > lo) & (arr < hi)):
            raise DomainError(f"{self.name}: t outside open domain ({lo}, {hi})")

    def jets(self, t) -> list[Jet3]:
        self.check(t)
        return [b.profile.jet(t) for b in self.blocks]

    def with_blocks(self, blocks, **changes) -> "PtFamily":
        kw = dict(
            name=self.name, blocks=tuple(blocks), domain=self.domain, params=dict(self.params),
            substitution=self.substitution, search_domain=self.search_domain,
            extendable=self.extendable,
        )
        kw.update(changes)
        return PtFamily(**kw)

    def split(self) -> "PtFamily":
        """Same metric with every block of multiplicity m replaced by m singletons."""
        blocks = [Block(b.profile, 1) for b in self.blocks for _ in range(b.multiplicity)]
        return self.with_blocks(blocks)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": dict(self.params),
            "domain": list(self.domain),
            "search_domain": list(self.scan_domain),
            "substitution": self.substitution,
            "dimension": self.dimension,
            "extendable": self.extendable,
            "blocks": [
                {"multiplicity": b.multiplicity, "profile": b.profile.to_dict()} for b in self.blocks
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PtFamily":
        dom = tuple(d["domain"])
        blocks = tuple(
            Block(profile_from_dict(b["profile"], dom), b["multiplicity"]) for b in d["blocks"]
        )
        search = tuple(d["search_domain"]) if d.get("search_domain") else None
        return cls(d["name"], blocks, dom, dict(d.get("params", {})), d.get("substitution"),
                   search if search != dom else None, bool(d.get("extendable", False)))


@dataclass(frozen=True)
class TraceInvariants:
    trA: Any
    trA2: Any
    trB: Any
    trC: Any
    trA3: Any
    trAB: Any

    @property
    def alpha(self):
        return -self.trA / 2

    @property
    def beta(self):
        return self.trA2 / 4


def block_ratios(fam: PtFamily, t) -> list[tuple[int, Any, Any, Any]]:
    """Per-block ``(m_i, p'/p, p''/p, p'''/p)`` at ``t``."""
    out = []
    for b, j in zip(fam.blocks, fam.jets(t)):
        out.append((b.multiplicity, j.d1 / j.v, j.d2 / j.v, j.d3 / j.v))
    return out


def trace_invariants(fam: PtFamily, t) -> TraceInvariants:
    trA = trA2 = trB = trC = trA3 = trAB = 0.0
    for m, a, b, c in block_ratios(fam, t):
        trA = trA + m * a
        trA2 = trA2 + m * a * a
        trB = trB + m * b
        trC = trC + m * c
        trA3 = trA3 + m * a**3
        trAB = trAB + m * a * b
    return TraceInvariants(trA, trA2, trB, trC, trA3, trAB)


def mixed_traces(fam: PtFamily, t, r) -> tuple[Any, Any]:
    """``(sum m p_i'(r)/p_i(t), sum m p_i''(r)/p_i(t))``.

    ``r`` may leave the domain only for extendable families.
    """
    fam.check(t)
    if not fam.extendable:
        fam.check(r)
    trAr = trBr = 0.0
    for b in fam.blocks:
        pt = b.profile.jet(t)
        pr = b.profile.jet(r)
        trAr = trAr + b.multiplicity * pr.d1 / pt.v
        trBr = trBr + b.multiplicity * pr.d2 / pt.v
    return trAr, trBr


def ricci_normal(fam: PtFamily, t):
    """Ricci curvature in the normal direction, ``(trA2 - 2 trB) / 4``."""
    inv = trace_invariants(fam, t)
    return (inv.trA2 - 2 * inv.trB) / 4


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

HALF_PI = math.pi / 2


def _fam(name, blocks, domain, params, **kw) -> PtFamily:
    return PtFamily(name, tuple(Block(p, m) for p, m in blocks), domain, params, **kw)


def sphere(n: int) -> PtFamily:
    _need(n >= 1, "sphere needs n >= 1")
    dom = (0.0, math.pi)
    return _fam("sphere", [(SinSq(dom=dom), n)], dom, {"n": n},
                substitution=X_COS2, search_domain=(0.0, HALF_PI), extendable=True)


def clifford(n: int, k: int) -> PtFamily:
    _need(1 <= k <= n - 1, "clifford needs 1 <= k <= n-1")
    dom = (0.0, HALF_PI)
    return _fam("clifford", [(CosSq(dom=dom), k), (SinSq(dom=dom), n - k)], dom,
                {"n": n, "k": k}, substitution=X_COS2, extendable=True)


def cpn_eta_sq(n: int, p: int) -> float:
    return 2 * (n - p - 1) / (n - p) + 2 * p / (p + 1)


def cpn(n: int, p: int) -> PtFamily:
    _need(1 <= p <= n - 1, "cpn needs 1 <= p <= n-1")
    dom = (0.0, HALF_PI)
    eta2 = cpn_eta_sq(n, p)
    blocks = [(CosSq(dom=dom), 2 * p)]
    if n - p - 1 > 0:
        blocks.append((SinSq(dom=dom), 2 * (n - p - 1)))
    blocks.append((SinSq(2.0, 0.0, eta2 / 4, dom=dom), 1))
    return _fam("cpn", blocks, dom, {"n": n, "p": p, "eta_sq": eta2}, substitution=X_COS2)


def hpn(n: int) -> PtFamily:
    _need(n >= 2, "hpn needs n >= 2")
    dom = (0.0, HALF_PI)
    return _fam("hpn", [(SinSq(dom=dom), 4 * (n - 1)), (SinSq(2.0, dom=dom), 3)], dom,
                {"n": n}, substitution=X_COS2)


def quadric(n: int) -> PtFamily:
    _need(n >= 2, "quadric needs n >= 2")
    dom = (0.0, HALF_PI)
    return _fam("quadric", [(CosSq(dom=dom), 1), (Constant(1.0), n - 1), (SinSq(dom=dom), n - 1)],
                dom, {"n": n}, substitution=X_COS2)


def su3() -> PtFamily:
    dom = (0.0, HALF_PI)
    return _fam("su3", [
        (Constant(4.0), 1),
        (CosSq(1.0, 0.0, 4.0, dom=dom), 2),
        (SinSq(0.5, 0.0, 4.0, dom=dom), 2),
        (CosSq(0.5, 0.0, 4.0, dom=dom), 2),
    ], dom, {}, substitution=X_COS2)


def s2xs2_so3() -> PtFamily:
    dom = (0.0, HALF_PI)
    return _fam("s2xs2_so3", [
        (Sine(scale=2.0, dom=dom), 1), (Cosine(scale=2.0, dom=dom), 1), (Constant(2.0), 1),
    ], dom, {})


def _isoparametric(name: str, g: int) -> PtFamily:
    dom = (0.0, math.pi / g)
    blocks = [(SinSq(1.0, -j * math.pi / g, dom=dom), 2) for j in range(g)]
    return _fam(name, blocks, dom, {"g": g}, substitution=X_COS2)


def s7g3() -> PtFamily:
    return _isoparametric("s7g3", 3)


def s9g4() -> PtFamily:
    return _isoparametric("s9g4", 4)


def s13g6() -> PtFamily:
    return _isoparametric("s13g6", 6)


def s2xs2_su2() -> PtFamily:
    dom = (0.0, math.pi / 4)
    return _fam("s2xs2_su2", [(SinSq(2.0, dom=dom), 1), (Constant(1.0), 1), (CosSq(2.0, dom=dom), 1)],
                dom, {}, substitution=X_COS2)


def revolution(phi: Profile, domain: tuple[float, float] | None = None) -> PtFamily:
    """Surface of revolution with radius function ``phi``; the block entry is ``phi^2``."""
    dom = domain or phi.domain
    return _fam("revolution", [(Square(phi), 1)], _finite(dom), {"phi": phi.to_dict()})


def warped(f2: Profile, n: int, domain: tuple[float, float] | None = None) -> PtFamily:
    """Warped product ``dt^2 + f^2 g_{S^n}``; ``f2`` is the entry ``f^2``."""
    dom = domain or f2.domain
    return _fam("warped", [(f2, n)], _finite(dom), {"n": n, "f2": f2.to_dict()})


def doubly_warped(f2: Profile, n: int, h2: Profile, m: int,
                  domain: tuple[float, float] | None = None) -> PtFamily:
    dom = domain
    if dom is None:
        dom = (max(f2.domain[0], h2.domain[0]), min(f2.domain[1], h2.domain[1]))
    return _fam("doubly_warped", [(f2, n), (h2, m)], _finite(dom),
                {"n": n, "m": m, "f2": f2.to_dict(), "h2": h2.to_dict()})


def foliation_doubly_warped(n: int, m: int) -> PtFamily:
    """The biharmonic foliation metric ``dt^2 + e^{2t} g_{S^n} + cos(2t sqrt(n/m)) g_{S^m}``."""
    half = math.pi / 4 * math.sqrt(m / n)
    dom = (-half, half)
    fam = doubly_warped(Exp2(1.0), n, Cosine(2 * math.sqrt(n / m), dom=dom), m, domain=dom)
    return fam


def _finite(dom):
    lo, hi = dom
    if not (math.isfinite(lo) or math.isfinite(hi)):
        raise ValueError("an explicit domain is required for profiles defined on the whole line")
    return (lo, hi)


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


#: name -> (constructor, ordered integer parameter names)
CATALOG: dict[str, tuple[Callable[..., PtFamily], tuple[str, ...]]] = {
    "sphere": (sphere, ("n",)),
    "clifford": (clifford, ("n", "k")),
    "cpn": (cpn, ("n", "p")),
    "hpn": (hpn, ("n",)),
    "quadric": (quadric, ("n",)),
    "su3": (su3, ()),
    "s2xs2_so3": (s2xs2_so3, ()),
    "s7g3": (s7g3, ()),
    "s9g4": (s9g4, ()),
    "s13g6": (s13g6, ()),
    "s2xs2_su2": (s2xs2_su2, ()),
    "doubly_warped_foliation": (foliation_doubly_warped, ("n", "m")),
}


def make_catalog_family(name: str, **params) -> PtFamily:
    """Build a named catalog family; unknown names or missing/extra params raise ``ValueError``.

    ``revolution``, ``warped`` and ``doubly_warped`` take profiles and are
    built by their own constructors.
    """
    try:
        ctor, names = CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; known: {', '.join(sorted(CATALOG))}") from None
    given = {k: v for k, v in params.items() if v is not None}
    missing = [k for k in names if k not in given]
    extra = [k for k in given if k not in names]
    if missing or extra:
        raise ValueError(f"{name} takes parameters {list(names)}; missing {missing}, unexpected {extra}")
    return ctor(*(int(given[k]) for k in names))

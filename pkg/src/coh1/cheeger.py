"""Cheeger deformation of diagonal families: ``P_s = P (Id + s P)^{-1}`` blockwise."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Block, PtFamily
from .jets import Cheeger


@dataclass(frozen=True)
class CheegerParam:
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.s) and self.s >= 0):
            raise ValueError(f"Cheeger parameter must be finite and >= 0, got {self.s}")


def cheeger_deform(fam: PtFamily, s: float) -> PtFamily:
    """Deform every block entry ``p`` to ``p / (1 + s p)``.

    Deforming an already deformed family composes parameters additively,
    since ``p/(1+s1 p)`` deformed by ``s2`` equals ``p/(1+(s1+s2) p)``.
    """
    s = CheegerParam(s).s
    blocks = []
    for b in fam.blocks:
        p = b.profile
        if isinstance(p, Cheeger):
            p = Cheeger(p.inner, p.s + s)
        else:
            p = Cheeger(p, s)
        blocks.append(Block(p, b.multiplicity))
    params = dict(fam.params)
    params["cheeger_s"] = params.get("cheeger_s", 0.0) + s
    return fam.with_blocks(blocks, params=params, extendable=False)

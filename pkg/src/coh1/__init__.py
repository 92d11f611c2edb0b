"""Biharmonic and r-harmonic orbits of cohomogeneity-one actions."""

from .cheeger import cheeger_deform
from .geometry import CATALOG, PtFamily, make_catalog_family, trace_invariants
from .solve import Classification, Functional, OrbitSolution, find_roots

__all__ = [
    "CATALOG",
    "Classification",
    "Functional",
    "OrbitSolution",
    "PtFamily",
    "cheeger_deform",
    "find_roots",
    "make_catalog_family",
    "trace_invariants",
]
__version__ = "0.1.0"

import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coh1 import geometry as geo
from coh1.jets import DomainError, PowerLaw


def test_sphere_invariants_closed_form():
    t = np.linspace(0.1, 3.0, 11)
    inv = geo.trace_invariants(geo.sphere(5), t)
    assert np.allclose(inv.trA, 10 / np.tan(t))
    assert np.allclose(inv.trB, 5 * 2 * np.cos(2 * t) / np.sin(t) ** 2)


@pytest.mark.parametrize("fam", [geo.clifford(5, 2), geo.cpn(3, 1), geo.hpn(4), geo.su3(), geo.s9g4()])
def test_splitting_blocks_leaves_invariants(fam):
    t = np.linspace(*fam.domain, 9)[1:-1]
    a, b = geo.trace_invariants(fam, t), geo.trace_invariants(fam.split(), t)
    for name in ("trA", "trA2", "trB", "trC", "trA3", "trAB"):
        assert np.allclose(getattr(a, name), getattr(b, name), rtol=1e-13)


@given(st.floats(0.1, 1.4))
def test_trA_derivative_identity(t):
    fam = geo.quadric(4)
    h = 1e-5
    fd = (geo.trace_invariants(fam, t + h).trA - geo.trace_invariants(fam, t - h).trA) / (2 * h)
    inv = geo.trace_invariants(fam, t)
    assert fd == pytest.approx(inv.trB - inv.trA2, rel=1e-6, abs=1e-6)


def test_dimensions():
    assert geo.sphere(4).dimension == 4
    assert geo.clifford(6, 2).dimension == 6
    assert geo.s7g3().dimension == 6
    assert geo.s13g6().dimension == 12


def test_catalog_lookup_errors():
    with pytest.raises(ValueError, match="unknown family"):
        geo.make_catalog_family("torus")
    with pytest.raises(ValueError, match="missing"):
        geo.make_catalog_family("clifford", n=4)
    with pytest.raises(ValueError):
        geo.make_catalog_family("clifford", n=4, k=4)


@pytest.mark.parametrize("name,params", [(n, {p: 3 if p != "k" and p != "p" else 1 for p in ps})
                                         for n, (_, ps) in geo.CATALOG.items()])
def test_family_json_round_trip(name, params):
    fam = geo.make_catalog_family(name, **params)
    d = json.loads(json.dumps(fam.to_dict()))
    again = geo.PtFamily.from_dict(d)
    assert again.to_dict() == fam.to_dict()
    t = np.linspace(*fam.domain, 7)[1:-1]
    assert np.allclose(geo.trace_invariants(again, t).trB, geo.trace_invariants(fam, t).trB)


def test_outside_domain_raises():
    with pytest.raises(DomainError):
        geo.trace_invariants(geo.clifford(4, 1), 2.0)


def test_linear_warping_gives_umbilic_leaves():
    # f^2 = t: every block ratio p'/(2p) is 1/(2t)
    fam = geo.warped(PowerLaw(1.0, 0.0, 0.5), 3, (0.0, 10.0))
    for t in (0.3, 1.0, 7.0):
        for _, a, _, _ in geo.block_ratios(fam, t):
            assert a / 2 == pytest.approx(1 / (2 * t), rel=1e-14)


def test_cpn_eta():
    assert geo.cpn_eta_sq(2, 1) == 1.0
    assert geo.cpn_eta_sq(3, 1) == pytest.approx(2.0)


def test_ricci_normal_of_round_sphere():
    # S^{n+1}: Ric(N, N) = n
    for t in (0.4, 1.1, 2.5):
        assert geo.ricci_normal(geo.sphere(4), t) == pytest.approx(4.0, rel=1e-13)

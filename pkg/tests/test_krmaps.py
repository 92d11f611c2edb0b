import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coh1 import geometry as geo
from coh1.cheeger import cheeger_deform
from coh1.krmaps import (
    DegreeInput, KrMap, NoConvergence, admissible_k, bitension_G, bitension_split,
    brouwer_degree, shoot_kr, tension_derivatives, tension_F, verify_table,
)


@pytest.mark.parametrize("fam", [geo.sphere(3), geo.clifford(4, 1), geo.quadric(3), geo.hpn(2)],
                         ids=lambda f: f.name)
def test_identity_is_harmonic(fam):
    m = KrMap.identity(fam)
    for t in np.linspace(*fam.domain, 52)[1:-1]:
        assert abs(tension_F(m, float(t))) < 1e-12
        assert abs(bitension_G(m, float(t))) < 1e-12


def test_doubling_map_tension_value():
    # sphere(2), r = 2t: F = 2 cot t - sin 4t / sin^2 t, which is 4 at pi/4
    m = KrMap.polynomial(geo.sphere(2), 2, [0.0, 2.0])
    assert tension_F(m, math.pi / 4) == pytest.approx(4.0, rel=1e-14)


def test_antipodal_reflection_is_harmonic():
    m = KrMap.polynomial(geo.sphere(2), 1, [math.pi, -1.0])
    for t in (0.3, 1.0, 2.2):
        assert abs(tension_F(m, t)) < 1e-12


@given(st.lists(st.floats(-0.3, 0.3), min_size=4, max_size=4), st.floats(0.4, 1.2))
@settings(max_examples=30)
def test_tension_derivatives_match_finite_differences(c, t):
    coeffs = [c[0], 1.0 + c[1], c[2], c[3]]
    m = KrMap.polynomial(geo.sphere(2), 1, coeffs)
    F, F1, F2 = tension_derivatives(m, t)
    h = 1e-4
    Fp, Fm = tension_F(m, t + h), tension_F(m, t - h)
    assert F1 == pytest.approx((Fp - Fm) / (2 * h), rel=1e-6, abs=1e-6)
    assert F2 == pytest.approx((Fp - 2 * F + Fm) / h**2, rel=1e-4, abs=1e-4)


def test_split_form_agrees_with_direct_bitension():
    m = KrMap.polynomial(geo.quadric(4), 1, [0.05, 0.9, 0.1])
    for t in (0.3, 0.7, 1.1):
        assert bitension_split(m, t) == pytest.approx(bitension_G(m, t), rel=1e-12)


def test_insufficient_jet_order():
    m = KrMap(geo.sphere(2), 1, lambda t: (t, 1.0, 0.0))
    tension_F(m, 0.5)
    with pytest.raises(ValueError):
        bitension_G(m, 0.5)


BRANCHES = {
    ("even", "odd", "odd", 2): "k", ("even", "even", "odd", 2): 1,
    ("odd", "odd", "odd", 4): "k", ("odd", "even", "even", 6): 0,
    ("odd", "even", "odd", 6): -1, ("odd", "even", "even", 4): 1,
    ("odd", "even", "odd", 8): 1, ("odd", "odd", "even", 6): 1,
}


@pytest.mark.parametrize("case,want", BRANCHES.items())
def test_degree_branches(case, want):
    k = 5
    assert brouwer_degree(DegreeInput(*case), k) == (k if want == "k" else want)


def test_degree_input_validation():
    with pytest.raises(ValueError):
        DegreeInput("odd", "even", "odd", 3)
    with pytest.raises(ValueError):
        DegreeInput("neither", "even", "odd", 4)
    assert admissible_k(2, 6) == 7


def test_shooting_recovers_identity():
    res = shoot_kr(geo.sphere(3), 1)
    assert res.converged
    assert np.max(np.abs(res.r - res.ts)) < 1e-4
    rows = res.rows()
    assert len(rows[0]) == 4 and rows[0][0] == pytest.approx(res.ts[0])


def test_shooting_requires_extendable_family():
    with pytest.raises(ValueError):
        shoot_kr(cheeger_deform(geo.sphere(3), 0.5), 1)


def test_shooting_reports_failure():
    with pytest.raises(NoConvergence) as info:
        shoot_kr(geo.sphere(3), 1, init_slope_range=(5.0, 5.0), max_iter=0)
    assert not info.value.result.converged


def test_table_verification_of_sampled_identity():
    fam = geo.sphere(3)
    ts = np.linspace(0.2, 2.9, 400)
    rows = verify_table(fam, 1, ts, ts, points=20)
    assert len(rows) == 20
    assert max(abs(r["F"]) for r in rows) < 1e-8


def test_admissible_k_examples():
    assert admissible_k(0, 6) == 1
    assert admissible_k(2, 2) == 3
    assert admissible_k(1, 4) == 3


@pytest.mark.parametrize("t", [math.pi / 4, 0.6])
def test_doubling_map_bitension_against_fourth_order_stencil(t):
    m = KrMap.polynomial(geo.sphere(2), 2, [0.0, 2.0])
    h = 1e-3
    F = [tension_F(m, t + i * h) for i in (-2, -1, 0, 1, 2)]
    F1 = (F[0] - 8 * F[1] + 8 * F[3] - F[4]) / (12 * h)
    F2 = (-F[0] + 16 * F[1] - 30 * F[2] + 16 * F[3] - F[4]) / (12 * h * h)
    A = float(geo.trace_invariants(geo.sphere(2), t).trA)
    _, trBr = geo.mixed_traces(geo.sphere(2), t, 2 * t)
    # G vanishes at pi/4 by symmetry, so the tolerance is relative to the size of F''
    assert bitension_G(m, t) == pytest.approx(F2 + 0.5 * F1 * A - 0.5 * F[2] * trBr, abs=1e-6 * (1 + abs(F2)))
    assert bitension_split(m, t) == pytest.approx(bitension_G(m, t), abs=1e-10)


def test_far_seed_gives_a_genuine_solution_or_fails():
    fam = geo.sphere(3)
    try:
        res = shoot_kr(fam, 1, init_slope_range=(2.0, 3.0))
    except NoConvergence:
        return
    assert res.converged and res.mismatch < 1e-8
    # tension recomputed from the exported samples agrees with the integrated F
    rows = verify_table(fam, 1, res.ts, res.r, points=30)
    integrated = np.interp([r["t"] for r in rows], res.ts, res.F)
    scale = 1 + np.max(np.abs(res.F))
    assert np.max(np.abs(np.array([r["F"] for r in rows]) - integrated)) < 1e-3 * scale

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coh1.jets import (
    Cheeger, Constant, CosSq, DomainError, Exp2, Jet3, JetDivisionError, PowerLaw, SinSq,
    Sine, Square, UserTable, eval_profile, jet_div, jet_mul, profile_from_dict,
)

coef = st.floats(-3, 3, allow_nan=False)
cubic = st.lists(coef, min_size=4, max_size=4)


def poly_jet(c, t):
    p = np.polynomial.Polynomial(c)
    return Jet3(p(t), p.deriv(1)(t), p.deriv(2)(t), p.deriv(3)(t))


def poly_derivs(p, t):
    return [p.deriv(k)(t) if k else p(t) for k in range(4)]


@given(cubic, cubic, st.floats(-2, 2))
def test_product_rule_matches_polynomial_product(a, b, t):
    pa, pb = np.polynomial.Polynomial(a), np.polynomial.Polynomial(b)
    got = jet_mul(poly_jet(a, t), poly_jet(b, t)).as_tuple()
    want = poly_derivs(pa * pb, t)
    scale = 1 + max(abs(x) for x in want)
    assert np.allclose(got, want, atol=1e-12 * scale)


@given(cubic, cubic, st.floats(-2, 2))
def test_quotient_times_divisor_recovers_numerator(a, b, t):
    jb = poly_jet(b, t)
    if abs(jb.v) < 0.1:
        jb = jb + 1.0
    ja = poly_jet(a, t)
    back = jet_div(ja, jb) * jb
    assert np.allclose(back.as_tuple(), ja.as_tuple(), rtol=1e-9, atol=1e-9)


def test_division_by_vanishing_value_raises():
    with pytest.raises(JetDivisionError):
        jet_div(Jet3.const(1.0), Jet3(0.0, 1.0, 0.0, 0.0))


def test_sinsq_closed_form():
    t, w = 0.3, 2.0
    j = SinSq(omega=w).jet(t)
    u = w * t
    assert j.v == pytest.approx(math.sin(u) ** 2, abs=1e-15)
    assert j.d1 == pytest.approx(w * math.sin(2 * u), abs=1e-15)
    assert j.d2 == pytest.approx(2 * w * w * math.cos(2 * u), abs=1e-14)
    assert j.d3 == pytest.approx(-4 * w**3 * math.sin(2 * u), abs=1e-14)


def test_powerlaw_and_exp():
    j = PowerLaw(1.5, 0.5, 0.75).jet(1.5)
    # 2.25 * 2^{1.5}
    assert j.v == pytest.approx(2.25 * 2**1.5, rel=1e-15)
    assert j.d1 == pytest.approx(2.25 * 1.5 * 2**0.5, rel=1e-15)
    e = Exp2(a=0.5).jet(0.2)
    assert e.d3 / e.v == pytest.approx(1.0, rel=1e-14)


def test_square_of_sine_is_sinsq():
    t = np.linspace(0.1, 3.0, 7)
    got = Square(Sine()).jet(t).as_tuple()
    want = SinSq().jet(t).as_tuple()
    for g, w in zip(got, want):
        assert np.allclose(g, w, atol=1e-14)


@given(st.floats(0.05, 3.0), st.floats(0.05, 1.5))
def test_cheeger_entry_formula(s, t):
    j = Cheeger(CosSq(), s).jet(t)
    p = math.cos(t) ** 2
    assert j.v == pytest.approx(p / (1 + s * p), rel=1e-13)


def test_cheeger_zero_is_bitwise_identity():
    t = np.linspace(0.1, 1.4, 9)
    for g, w in zip(Cheeger(SinSq(omega=3.0), 0.0).jet(t).as_tuple(), SinSq(omega=3.0).jet(t).as_tuple()):
        assert np.array_equal(g, w)


def test_cheeger_rejects_negative():
    with pytest.raises(ValueError):
        Cheeger(SinSq(), -0.1)


def test_domain_is_enforced():
    p = SinSq(dom=(0.0, math.pi))
    with pytest.raises(DomainError):
        eval_profile(p, 4.0)
    with pytest.raises(ValueError):
        Constant(0.0)


@pytest.mark.parametrize("p", [
    SinSq(omega=2.0, phi=0.1, scale=3.0, dom=(0.0, 1.0)),
    Cheeger(CosSq(omega=3.0), 0.5),
    Square(Sine(offset=2.0)),
    PowerLaw(1.0, 0.5, 0.25),
    Exp2(a=-1.0, scale=2.0),
])
def test_profile_dict_round_trip(p):
    back = profile_from_dict(json.loads(json.dumps(p.to_dict())), getattr(p, "dom", None))
    assert back == p


def test_user_table_recovers_smooth_profile():
    ts = np.linspace(0.0, 2.0, 201)
    tab = UserTable(tuple(ts), tuple(1.0 + np.sin(ts) ** 2))
    assert tab.verify_only
    j, exact = tab.jet(1.0), Square(Sine()).jet(1.0)
    assert j.d1 == pytest.approx(exact.d1, abs=1e-7)
    assert j.d2 == pytest.approx(exact.d2, abs=1e-5)
    assert j.d3 == pytest.approx(exact.d3, abs=1e-3)
    with pytest.raises(ValueError):
        UserTable((0.0, 1.0), (1.0, 2.0))

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coh1 import geometry as geo
from coh1.foliation import (
    TorusCubic, doubly_warped_interval, doubly_warped_minimal_time, doubly_warped_residual,
    doubly_warped_trA, leaf_ode_residual, torus_family, torus_partition_check,
    warped_leaf_residual, warped_profile,
)
from coh1.jets import DomainError
from coh1.solve import Functional, find_roots


@given(st.integers(2, 8), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_warped_leaves_solve_leaf_equation(r, c1, c2):
    t = np.linspace(0.0, 10.0, 50)
    assert np.max(np.abs(warped_leaf_residual(r, c1, c2, t))) < 1e-12


def test_non_solution_has_nonzero_residual():
    f, df, ddf = warped_profile(3, 1.0, 1.0, 2.0)
    assert abs(leaf_ode_residual(f, df, ddf, 2)) > 1e-3


@pytest.mark.parametrize("bad", [dict(r=1, c1=1, c2=1), dict(r=2, c1=0, c2=1), dict(r=2, c1=1, c2=-1)])
def test_warped_parameter_validation(bad):
    with pytest.raises(ValueError):
        warped_leaf_residual(bad["r"], bad["c1"], bad["c2"], 1.0)


@pytest.mark.parametrize("n,m", [(1, 1), (2, 3), (3, 2), (4, 1)])
def test_doubly_warped(n, m):
    lo, hi = doubly_warped_interval(n, m)
    t = np.linspace(lo, hi, 52)[1:-1]
    assert np.max(np.abs(doubly_warped_residual(n, m, t))) < 1e-12
    t_star = doubly_warped_minimal_time(n, m)
    assert abs(float(doubly_warped_trA(n, m, t_star))) < 1e-12
    mins = find_roots(geo.foliation_doubly_warped(n, m), Functional.minimal())
    assert len(mins) == 1 and mins[0].t_root == pytest.approx(t_star, abs=1e-10)


def test_doubly_warped_symmetric_case():
    assert doubly_warped_minimal_time(1, 1) == pytest.approx(math.pi / 8, abs=1e-15)
    with pytest.raises(DomainError):
        doubly_warped_residual(1, 1, math.pi / 4)


@given(st.floats(-5, 5).filter(lambda a: abs(a) > 1e-3), st.floats(0, 1))
def test_torus_leaves_close_up_smoothly(a, d):
    psi = torus_family(a, d)
    assert psi.proper and psi.c0_periodic and psi.c1_periodic
    left, right = psi.one_sided_jets()
    assert left[0] == pytest.approx(right[0], abs=1e-12)
    assert left[1] == pytest.approx(right[1], abs=1e-12)
    assert psi.fourth_derivative(0.3) == 0.0


def test_torus_rejects_straight_lines():
    with pytest.raises(ValueError):
        torus_family(0.0, 0.0)
    assert not TorusCubic(0.0, 0.0, 0.0, 1.0).proper
    assert not TorusCubic(1.0, 1.0, 0.0, 0.0).c0_periodic


@pytest.mark.parametrize("a", [1.0, -0.4, 2.5])
def test_torus_partition(a):
    assert torus_partition_check(a, 10_000)


def test_torus_gluing_is_c1_not_c2():
    a = 1.0
    psi = torus_family(a, 0.0)
    assert (psi.a, psi.b, psi.c, psi.d) == (2.0, -3.0, 1.0, 0.0)
    left, right = psi.one_sided_jets()
    assert left[2] == pytest.approx(6 * a) and right[2] == pytest.approx(-6 * a)


def test_constant_leaf_profile_has_zero_residual():
    assert leaf_ode_residual(2.0, 0.0, 0.0, 3) == 0.0


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_warped_examples(t):
    assert abs(float(warped_leaf_residual(2, 1.0, 1.0, t))) < 1e-12
    assert np.max(np.abs(warped_leaf_residual(5, 2.0, 0.3, np.linspace(0, 10, 20)))) < 1e-12

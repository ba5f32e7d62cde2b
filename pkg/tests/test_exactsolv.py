import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toboggan.exactsolv import (build_case, continuation_check, continuation_plan,
                                monodromy_coefficients, monodromy_limit, monodromy_matrix)


def test_case_arithmetic():
    c = build_case(3, 0, 1, 1)
    assert (c.ell, c.nu, c.gamma, c.bound, c.m) == (0, Fraction(1, 2), 0, True, 2)
    c = build_case(3, 0, 1, 2)
    assert c.nu == 1 and not c.bound
    c = build_case(5, 1, 2, 3)
    assert c.nu == Fraction(3, 4)
    assert c.gamma == Fraction(9, 16) - Fraction(25, 4)
    assert c.bound


def test_case_rejects_bad_labels():
    with pytest.raises(ValueError):
        build_case(3, 0, 0, 1)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_unphysical_coefficient_exactly_zero(N):
    for M in range(1, 21):
        case = build_case(3, 0, N, M)
        if not case.bound:
            continue
        cp, cu = monodromy_coefficients(case.nu, case.m)
        assert cu == 0
        assert cp in (1, -1)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_integer_order_limit(N):
    for M in range(2 * N, 21, 2 * N):
        case = build_case(3, 0, N, M)
        assert not case.bound
        cp, cu = monodromy_limit(int(case.nu), case.m)
        assert abs(cu) == case.m
        assert abs(cp) == case.m + 1


def test_half_order_example():
    assert monodromy_coefficients(Fraction(1, 2), 2) == (-1, 0)


def test_third_order_example():
    cp, cu = monodromy_coefficients(Fraction(1, 3), 2)
    assert abs(cu - cmath.exp(1j * math.pi / 3)) < 1e-15


def test_identity_monodromy():
    assert monodromy_coefficients(Fraction(2, 7), 0) == (1, 0)
    assert monodromy_limit(1, 0) == (1, 0)


def test_integer_order_routed_to_limit():
    with pytest.raises(ValueError):
        monodromy_coefficients(Fraction(1), 2)
    assert abs(monodromy_limit(2, 2)[1]) == 2


@settings(max_examples=50)
@given(st.fractions(min_value=Fraction(1, 40), max_value=5, max_denominator=40)
       .filter(lambda f: f.denominator != 1), st.integers(1, 6))
def test_coefficients_match_float_formula(nu, half_m):
    m = 2 * half_m
    x = float(nu)
    s = math.sin(math.pi * x)
    cp, cu = monodromy_coefficients(nu, m)
    assert abs(cp - math.sin((1 + m) * math.pi * x) / s) < 1e-9 * (1 + abs(cp))
    ref = cmath.exp(1j * math.pi * x) * math.sin(m * math.pi * x) / s
    assert abs(cu - ref) < 1e-9 * (1 + abs(cu))


@settings(max_examples=30)
@given(st.fractions(min_value=Fraction(1, 30), max_value=4, max_denominator=30)
       .filter(lambda f: f.denominator != 1), st.integers(1, 4))
def test_monodromy_is_unimodular(nu, half_m):
    M = monodromy_matrix(nu, 2 * half_m)
    assert abs(np.linalg.det(M) - 1) < 1e-8 * np.abs(M).max() ** 2


@pytest.mark.parametrize("nu", [3, 4])
def test_limit_matches_nearby_orders(nu):
    cp, cu = monodromy_limit(nu, 4)
    near = monodromy_coefficients(Fraction(nu) + Fraction(1, 10 ** 7), 4)
    assert abs(near[0] - cp) < 1e-4
    assert abs(near[1] - cu) < 1e-4


def test_continuation_decays_for_bound_case():
    assert continuation_check(build_case(3, 0, 1, 1), kappa=1.0) < 1e-3


@pytest.mark.parametrize("N,M", [(1, 3), (2, 1), (2, 3)])
def test_continuation_other_bound_cases(N, M):
    assert continuation_check(build_case(3, 0, N, M)) < 1e-3


def test_continuation_does_not_decay_without_bound_state():
    case = build_case(3, 0, 1, 2)
    with pytest.raises(ValueError):
        continuation_check(case)
    assert continuation_check(case, force=True) > 0.1


def test_plan_keeps_away_from_origin():
    eps, s_end = continuation_plan(build_case(3, 0, 2, 3))
    assert eps > 0 and 0 < s_end <= 30.0


def test_continuation_refuses_unturned_spiral():
    from toboggan.odeint import IntegrationError
    with pytest.raises(IntegrationError):
        continuation_check(build_case(3, 0, 4, 6))

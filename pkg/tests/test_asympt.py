import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toboggan.asympt import (build_case, case_from_ell, case_from_tau, effective_minimum,
                             energy_estimate, untwisted_estimate, log_slope, rescale_F,
                             self_consistent_well, semiclassical_estimate, shooting_levels,
                             stationarity_residual)

L48 = 0.5 * (math.sqrt(1 + 4 * 48) - 1)  # L(L+1) = 48


def test_tau_two_from_strength_48():
    case = build_case(0, L48)
    assert case.tau == pytest.approx(2.0, rel=1e-14)
    assert case.omega == pytest.approx(math.sqrt(7.5), rel=1e-14)


@pytest.mark.parametrize("N", [0, 1, 2])
def test_roots_are_stationary_points(N):
    case = case_from_tau(N, 1.7)
    assert len(case.roots) == 10 * N + 5
    k = case.degree
    for T in case.roots:
        val = 1j * (-1) ** N * case.m ** 2 * (10 * N + 3) * T ** k
        assert abs(val - 2 * case.L * (case.L + 1)) < 1e-10 * abs(val)
    assert abs(case.roots[0] + 1j * case.tau) < 1e-14


def test_closed_form_example():
    case = build_case(0, L48)
    assert energy_estimate(case, 0) == pytest.approx(-20 + math.sqrt(15), rel=1e-14)
    assert energy_estimate(case, 2) == pytest.approx(-20 + 5 * math.sqrt(15), rel=1e-14)


@settings(max_examples=40)
@given(st.floats(0.3, 20.0), st.integers(0, 6))
def test_untwisted_form_agrees(tau, n):
    assert energy_estimate(case_from_tau(0, tau), n) == pytest.approx(untwisted_estimate(tau, n), rel=1e-10)


def test_taylor_coefficients_at_minimum():
    q, t = effective_minimum(0, L48)
    assert abs(q + 2j) < 1e-14
    assert abs(t["value"] + 20) < 1e-12
    assert abs(t["slope"]) < 1e-12
    assert abs(t["quadratic"] - 15) < 1e-12
    assert abs(t["cubic"] + 5j) < 1e-12


@pytest.mark.parametrize("N", [0, 1, 2, 3])
@pytest.mark.parametrize("L", [3.0, 50.0, 1e4])
def test_stationarity(N, L):
    assert stationarity_residual(N, L) < 1e-12


@settings(max_examples=30)
@given(st.integers(0, 3), st.floats(0.2, 50.0))
def test_ell_tau_round_trip(N, ell):
    c = case_from_ell(N, ell)
    assert c.ell == pytest.approx(ell, rel=1e-12)
    assert case_from_tau(N, c.tau).L == pytest.approx(c.L, rel=1e-9)


def test_rescaling():
    rho, F = rescale_F(-10.0, 1.5)
    assert rho == pytest.approx(0.25)
    assert F == pytest.approx(-10.0 * 0.25 ** 0.6)
    with pytest.raises(ValueError):
        rescale_F(1.0, -0.5)


@pytest.mark.parametrize("rho", [1e-6, 1e-4, 1e-3])
def test_closed_form_F_decreases_with_N(rho):
    ell = 1 / math.sqrt(rho) - 0.5
    F = [rescale_F(energy_estimate(case_from_ell(N, ell), 0), ell)[1] for N in range(4)]
    assert all(b < a for a, b in zip(F, F[1:]))


@pytest.mark.parametrize("N", [0, 1, 4, 8])
@pytest.mark.parametrize("n", [0, 3])
def test_F_flat_at_small_rho(N, n):
    assert abs(log_slope(N, n, 1e-6)) < 0.05


def test_self_consistent_well_is_double_zero():
    case = case_from_tau(1, 2.0)
    y, E, _ = self_consistent_well(case)
    N, m = case.N, case.m
    P = lambda z: (1j * (-1) ** N * m * m * z ** (10 * N + 3) + case.L * (case.L + 1) / z ** 2
                   - E * m * m * z ** (4 * N))
    h = 1e-6 * abs(y)
    assert abs(P(y)) < 1e-10 * abs(E * m * m * y ** (4 * N))
    assert abs(P(y + h) - P(y - h)) / (2 * h) < 1e-6 * abs(E * m * m * y ** (4 * N - 1))


def test_shooting_approaches_semiclassics_untwisted():
    err = []
    for tau in (3.0, 6.0):
        case = case_from_tau(0, tau)
        E0, E1 = shooting_levels(case, (0, 1))
        assert abs(E0.imag) < 1e-6 * abs(E0) and E1.real > E0.real
        err.append(abs(E0.real - semiclassical_estimate(case, 0)))
    # next correction is O(1/tau**2)
    assert err[0] / err[1] == pytest.approx(4.0, rel=0.05)


def test_shooting_matches_semiclassics_twisted():
    case = case_from_tau(1, 3.0)
    E0, E1 = shooting_levels(case, (0, 1))
    for n, val in enumerate((E0, E1)):
        assert abs(val.real - semiclassical_estimate(case, n)) < 1e-7 * abs(val)

import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toboggan.gaussian import GaussRational as G
from toboggan.xform import (PotentialSpec, SturmProblem, harmonic, imaginary_cubic, plain,
                            prefactor, rectify)

HALF = Fraction(1, 2)


@pytest.mark.parametrize("alpha", [Fraction(1), Fraction(3, 10), Fraction(7, 3)])
def test_sextic_display(alpha):
    s = rectify(harmonic(alpha - HALF), 2)
    assert s.potential.terms == ((G(4), 6),)
    assert s.potential.centrifugal == G(4 * alpha ** 2 - Fraction(1, 4))
    assert (s.weight_coeff, s.weight_power) == (G(-4), 2)


@pytest.mark.parametrize("N", range(7))
def test_cubic_displays(N):
    ell = Fraction(5, 3)
    m = 2 * N + 1
    s = rectify(imaginary_cubic(ell), m)
    assert s.potential.terms == ((G(0, (-1) ** N * m * m), 10 * N + 3),)
    assert s.big_ell + G(HALF) == G(m) * G(ell + HALF)
    assert (s.weight_coeff, s.weight_power) == (G(m * m), 4 * N)
    L = s.big_ell
    assert s.potential.centrifugal == L * (L + G(1))


def test_identity_map():
    p = PotentialSpec.from_terms([(G(2, 1), 4), (G(-1), 0)], ell=Fraction(1, 3))
    s = rectify(p, 1)
    assert s == plain(p)
    assert (s.weight_coeff, s.weight_power) == (G(1), 0)


def test_like_powers_merge():
    p = PotentialSpec.from_terms([(1, 2), (2, 2), (G(0, 1), 1), (G(0, -1), 1)])
    assert p.terms == ((G(3), 2),)


def test_rejects_fractional_powers_and_bad_m():
    with pytest.raises(ValueError):
        PotentialSpec.from_terms([(1, 1.5)])
    with pytest.raises(ValueError):
        rectify(harmonic(0), 0)


def test_equation_text():
    s = rectify(harmonic(HALF), 2)
    assert s.equation_text() == "-phi'' + [4*y^6 + (15/4)/y^2] phi = E * [-4*y^2] phi"


def test_json_round_trip_and_shape():
    s = rectify(imaginary_cubic(Fraction(7, 2)), 5)
    d = s.to_dict()
    assert {"terms", "big_ell", "weight", "map_exponent"} <= set(d)
    assert SturmProblem.from_json(s.to_json()) == s


def test_prefactor_values():
    assert prefactor(1, 0.3 - 2j) == 1
    assert abs(prefactor(3, -1j) - np.sqrt(3)) < 1e-14
    y = np.array([0.5 - 0.2j, 1 - 1j])
    f = prefactor(2, y)
    # proportional to sqrt(y) on the U-path: f**2 = 2 i y
    assert np.allclose(f ** 2, 2j * y)


def test_prefactor_branch_is_continuous():
    s = np.linspace(-5, 5, 1001)
    y = s - 0.5j
    f = prefactor(4, y)
    assert np.max(np.abs(np.diff(f))) < 0.2


small = st.fractions(min_value=-3, max_value=3, max_denominator=7)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(small, small, st.integers(-1, 5)), min_size=1, max_size=3),
       st.one_of(st.none(), small.filter(lambda f: f > -HALF)),
       st.integers(1, 5), st.complex_numbers(max_magnitude=3),
       st.floats(0.3, 2.0), st.floats(-np.pi, np.pi))
def test_liouville_oracle(terms, ell, m, E, r, th):
    """Pointwise agreement with f'**2 (V(f) - E) + (m**2 - 1)/(4 y**2)."""
    pot = PotentialSpec.from_terms([(G(a, b), p) for a, b, p in terms], ell=ell)
    s = rectify(pot, m)
    y = r * cmath.exp(1j * th)
    f = 1j ** (m - 1) * y ** m
    fp = m * 1j ** (m - 1) * y ** (m - 1)
    expect = fp ** 2 * (complex(pot(f)) - E) + (m * m - 1) / (4 * y * y)
    got = complex(s.Q(y, E))
    assert abs(got - expect) <= 1e-9 * (1 + abs(expect))


@given(st.integers(1, 9), small.filter(lambda f: f > -HALF))
def test_positive_root_convention(m, ell):
    s = rectify(harmonic(ell), m)
    assert s.big_ell == G(m * (ell + HALF) - HALF)
    assert (s.big_ell + G(HALF)) * (s.big_ell + G(HALF)) == G(m * m * (ell + HALF) ** 2)

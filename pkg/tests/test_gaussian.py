from fractions import Fraction

from hypothesis import given, strategies as st

from toboggan.gaussian import GaussRational as G

fr = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 100)
gauss = st.builds(G, fr, fr)


def test_powers_of_i_cycle():
    assert [G.i_power(k) for k in range(5)] == [G(1), G(0, 1), G(-1), G(0, -1), G(1)]
    assert G.i_power(-1) == G(0, -1)


def test_text_forms():
    assert str(G(0, 1)) == "i"
    assert str(G(0, -9)) == "-9i"
    assert str(G(Fraction(15, 4))) == "15/4"


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if b != G(0):
        assert (a / b) * b == a


@given(gauss, st.integers(0, 6), st.integers(0, 6))
def test_integer_powers_add(a, p, q):
    assert a ** p * a ** q == a ** (p + q)


@given(gauss)
def test_conjugate_norm(a):
    assert (a * a.conjugate()).is_real
    assert (a * a.conjugate()).re == a.norm2()
    assert abs(complex(a) - complex(float(a.re), float(a.im))) == 0

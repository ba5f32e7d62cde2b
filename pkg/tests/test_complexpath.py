import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toboggan.complexpath import (ContourError, ContourSpec, pullback_path, rotate_path,
                                  sample_csv, stokes_wedges, symmetric_pairs, total_turning,
                                  unit_root, winding_path, wkb_power)


def test_winding_zero_is_shifted_line():
    x, dx = winding_path(0, 0.5, 2.0)
    assert x == 2 - 0.5j
    assert dx == 1


def test_winding_one_at_origin_parameter():
    x, _ = winding_path(1, 1.0, 0.0)
    assert abs(x - (-1j)) < 1e-15


def test_winding_derivative_matches_difference_quotient():
    s, h = 0.7, 1e-6
    xp, _ = winding_path(2, 0.4, s + h)
    xm, _ = winding_path(2, 0.4, s - h)
    _, dx = winding_path(2, 0.4, s)
    assert abs((xp - xm) / (2 * h) - dx) < 1e-6 * abs(dx)


def test_rejects_nonpositive_shift():
    with pytest.raises(ContourError):
        winding_path(1, 0.0, 1.0)
    with pytest.raises(ContourError):
        ContourSpec.shifted_line(-1.0)


def test_origin_parameter_lies_below_axis():
    for c in (ContourSpec.shifted_line(0.3), ContourSpec.winding(2, 0.3)):
        assert c.point(0.0).imag < 0


@pytest.mark.parametrize("N", [0, 1, 2, 3])
def test_total_turning_approaches_odd_multiple_of_pi(N):
    got = total_turning(ContourSpec.winding(N, 0.5, span=1e3), 1e3)
    assert abs(got - (2 * N + 1) * math.pi) < 1e-2


def test_total_turning_grows_monotonically():
    c = ContourSpec.winding(1, 0.5, span=1e4)
    vals = [total_turning(c, S) for S in (1.0, 10.0, 100.0, 1000.0)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_pullback_of_winding_is_straight(N):
    m = 2 * N + 1
    y = pullback_path(ContourSpec.winding(N, 0.5), m)
    s = np.linspace(-20, 20, 2001)
    assert np.max(np.abs(y.point(s) - (s - 0.5j))) < 1e-10
    assert abs(total_turning(y, 1e3) - math.pi) < 1e-2


def test_pullback_of_line_is_u_shaped():
    u = pullback_path(ContourSpec.shifted_line(0.5), 2)
    s = np.linspace(0.1, 10, 50)
    left, right = u.point(-s), u.point(s)
    assert np.allclose(left, -np.conj(right), atol=1e-12)
    assert abs(u.point(0.0) - (-1j * math.sqrt(0.5))) < 1e-12
    # the vertex is the highest point; the arms descend towards arg -pi/4, -3pi/4
    assert np.all(np.diff(u.point(s).imag) < 0)
    far = u.point(1e4)
    assert abs(np.angle(far) + math.pi / 4) < 1e-2


def test_pullback_identity_for_m_one():
    c = ContourSpec.winding(1, 0.5)
    assert pullback_path(c, 1) is c


def test_pullback_derivative():
    u = pullback_path(ContourSpec.shifted_line(0.5), 3)
    s, h = 1.3, 1e-6
    num = (u.point(s + h) - u.point(s - h)) / (2 * h)
    assert abs(num - u.derivative(s)) < 1e-7


def test_rotation_full_turn_is_identity():
    u = pullback_path(ContourSpec.shifted_line(0.5), 2)
    s = np.linspace(-5, 5, 101)
    r = rotate_path(u, 4, 4)
    assert np.max(np.abs(r.point(s) - u.point(s))) == 0


def test_rotation_half_turn_reflects_line():
    c = ContourSpec.shifted_line(0.5)
    r = rotate_path(c, 2, 1)
    s = np.linspace(-3, 3, 7)
    assert np.allclose(r.point(s), -(s - 0.5j), atol=0)


def test_eight_rotations_are_distinct():
    u = pullback_path(ContourSpec.shifted_line(0.5), 2)
    pts = [rotate_path(u, 8, n).point(0.0) for n in range(1, 9)]
    d = [abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]]
    assert min(d) > 0.1


@given(st.integers(1, 12), st.integers(-20, 20))
def test_rotation_composed_k_times_returns(K, n):
    c = ContourSpec.winding(1, 0.5)
    r = c
    for _ in range(K):
        r = rotate_path(r, K, n)
    assert r.rotation == 0
    assert abs(r.point(0.7) - c.point(0.7)) < 1e-12


def test_unit_root_exact_at_quarters():
    assert unit_root(Fraction(1, 4)) == 1j
    assert unit_root(Fraction(3, 2)) == -1


def test_sextic_wedges():
    ws = stokes_wedges(6.0)
    assert len(ws) == 6
    assert all(abs(2 * w.half_width - math.pi / 6) < 1e-15 for w in ws)
    assert len(symmetric_pairs(ws)) == 3


def test_quadratic_wedges():
    centers = sorted(w.center_angle for w in stokes_wedges(2.0))
    assert np.allclose(centers, [0.0, math.pi])
    assert abs(stokes_wedges(2.0)[0].half_width - math.pi / 4) < 1e-15
    flipped = sorted(w.center_angle for w in stokes_wedges(2.0, phase=math.pi))
    assert np.allclose(flipped, [-math.pi / 2, math.pi / 2])


def test_wkb_power_of_degree_ten():
    assert wkb_power(10) == 6


def test_rejects_small_growth_power():
    with pytest.raises(ValueError):
        stokes_wedges(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.floats(-3.0, 3.0))
def test_wedges_tile_circle(p, phase):
    # cos(p theta + phase) is 2 pi periodic only for integer p
    ws = stokes_wedges(p, phase, include_growth=True)
    theta = np.linspace(-math.pi + 1e-3, math.pi, 997)
    for t in theta:
        inside = [w for w in ws if w.contains(t)]
        # boundaries belong to no wedge; all other angles to exactly one
        assert len(inside) <= 1
        if len(inside) == 1:
            assert inside[0].decay_flag == (math.cos(p * t + phase) > 0)
    for w in ws:
        assert w.contains(w.center_angle)


@settings(max_examples=30, deadline=None)
@given(st.floats(1.5, 9.0))
def test_pairing_is_involution(p):
    ws = stokes_wedges(p)
    for a, b in symmetric_pairs(ws):
        assert abs(math.remainder(a.center_angle + b.center_angle - math.pi, 2 * math.pi)) < 1e-9


def test_json_round_trip():
    c = rotate_path(pullback_path(ContourSpec.winding(1, 0.25, span=12.0), 3), 8, 3)
    back = ContourSpec.from_json(c.to_json())
    assert back == c
    d = c.to_dict()
    assert {"kind", "epsilon", "winding_n", "rotation_num", "rotation_den", "parent"} <= set(d)


def test_sample_csv_columns():
    text = sample_csv(ContourSpec.shifted_line(0.5), [0.0, 1.0])
    lines = text.strip().splitlines()
    assert lines[0] == "s,re_x,im_x"
    assert lines[2] == "1,1,-0.5"

"""Truncated-series arithmetic checks against closed forms."""

import math

import numpy as np

from isomerforge.vjet import VJet, dot3


def _poly(coeffs, order):
    return VJet([np.array(float(c)) for c in coeffs], order)


def test_mul_matches_numpy_polymul():
    a = _poly([1.0, 2.0, 0.5], 6)
    b = _poly([0.0, -1.0, 3.0, 0.25], 6)
    prod = a * b
    want = np.polymul([0.25, 3.0, -1.0, 0.0], [0.5, 2.0, 1.0])[::-1]
    for k in range(7):
        w = want[k] if k < want.size else 0.0
        assert abs(prod[k] - w) < 1e-14


def test_integrate_and_differentiate_are_inverse():
    a = _poly([0.3, -1.2, 0.7, 0.05], 5)
    back = a.integrate_v().d_dv()
    for k in range(5):
        assert abs(back[k] - a[k]) < 1e-14


def test_cos_sin_of_linear_series():
    # cos(m v), sin(m v) Taylor coefficients
    m = 0.8
    v = VJet.var(8) * m
    c, s = v.cos_sin()
    for k in range(9):
        cw = ((-1) ** (k // 2)) * m ** k / math.factorial(k) if k % 2 == 0 else 0.0
        sw = ((-1) ** ((k - 1) // 2)) * m ** k / math.factorial(k) if k % 2 == 1 else 0.0
        assert abs(c[k] - cw) < 1e-14
        assert abs(s[k] - sw) < 1e-14


def test_cos_sin_with_offset_constant():
    th = 0.6
    x = VJet.var(6) + th
    c, s = x.cos_sin()
    v = 0.1
    assert abs(c.eval(v) - np.cos(th + v)) < 1e-9
    assert abs(s.eval(v) - np.sin(th + v)) < 1e-9


def test_sqrt_squares_back():
    a = _poly([4.0, 1.0, -0.3, 0.02], 6)
    r = a.sqrt()
    sq = r * r
    for k in range(7):
        assert abs(sq[k] - a[k]) < 1e-12


def test_compose_with_rescale():
    a = _poly([0.0, 0.0, 1.0, 2.0], 5)           # v^2 + 2 v^3
    inner = VJet.var(5) * 0.5                     # v -> v/2
    comp = a.compose(inner)
    assert abs(comp[2] - 0.25) < 1e-14
    assert abs(comp[3] - 0.25) < 1e-14


def test_row_coefficients_broadcast():
    t = np.linspace(0, 1, 16)
    rows = VJet([np.zeros_like(t), np.cos(t), np.sin(t)], 4)
    sq = rows * rows
    assert np.allclose(sq[2], np.cos(t) ** 2, atol=1e-14)
    assert np.allclose(sq[3], 2 * np.cos(t) * np.sin(t), atol=1e-14)


def test_dot3():
    a = [_poly([1.0], 3), _poly([0.0, 1.0], 3), _poly([0.0], 3)]
    b = [_poly([2.0], 3), _poly([0.0, 3.0], 3), _poly([5.0], 3)]
    d = dot3(a, b)
    assert abs(d[0] - 2.0) < 1e-14
    assert abs(d[2] - 3.0) < 1e-14

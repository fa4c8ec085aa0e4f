"""Representation invariants of the Fourier-backed periodic functions."""

import numpy as np
import pytest

from isomerforge.periodic import PeriodicScalarFn, apply_pointwise, grid_derivative

L = 2 * np.pi


def _wave(t):
    return 2.0 + np.cos(t) + 0.4 * np.sin(2 * t) - 0.1 * np.cos(5 * t)


@pytest.fixture
def f():
    return PeriodicScalarFn.from_callable(_wave, L)


def test_periodicity(f):
    t = np.linspace(0, L, 17)
    assert np.allclose(f(t), f(t + L), atol=1e-12)


def test_matches_source(f):
    t = np.linspace(0, L, 113)
    assert np.allclose(f(t), _wave(t), atol=1e-12)


def test_derivative_consistent_with_finite_differences(f):
    # invariant: rel. error <= 1e-6 at grid midpoints for smooth inputs
    t = (np.arange(64) + 0.5) * (L / 64)
    h = 1e-5
    fd = (f(t + h) - f(t - h)) / (2 * h)
    an = f.derivative()(t)
    assert np.max(np.abs(an - fd)) <= 1e-6 * max(1.0, np.max(np.abs(an)))


def test_second_derivative_exact(f):
    t = np.linspace(0, L, 29)
    want = -np.cos(t) - 1.6 * np.sin(2 * t) + 2.5 * np.cos(5 * t)
    assert np.allclose(f.derivative(2)(t), want, atol=1e-10)


def test_algebra_product_and_sum(f):
    g = PeriodicScalarFn.from_callable(np.sin, L)
    t = np.linspace(0, L, 41)
    assert np.allclose((f * g)(t), _wave(t) * np.sin(t), atol=1e-12)
    assert np.allclose((f + g)(t), _wave(t) + np.sin(t), atol=1e-12)
    assert np.allclose((f - 2.0)(t), _wave(t) - 2.0, atol=1e-12)
    assert np.allclose((3.0 * f)(t), 3.0 * _wave(t), atol=1e-12)


def test_division_and_apply(f):
    t = np.linspace(0, L, 37)
    inv = 1.0 / f
    assert np.allclose(inv(t), 1.0 / _wave(t), atol=1e-10)
    r = f.apply(np.sqrt)
    assert np.allclose(r(t), np.sqrt(_wave(t)), atol=1e-10)


def test_compose_affine_shift_and_flip(f):
    t = np.linspace(0, L, 53)
    a = 0.7357
    assert np.allclose(f.compose_affine(1, a)(t), _wave(t + a), atol=1e-11)
    assert np.allclose(f.compose_affine(-1, a)(t), _wave(a - t), atol=1e-11)


def test_from_fourier_terms_round_trip():
    terms = [[0, 0.5, 0.0], [1, 1.0, -0.25], [3, 0.0, 0.75]]
    f = PeriodicScalarFn.from_fourier_terms(terms, L)
    t = np.linspace(0, L, 19)
    want = 0.5 + np.cos(t) - 0.25 * np.sin(t) + 0.75 * np.sin(3 * t)
    assert np.allclose(f(t), want, atol=1e-13)
    back = PeriodicScalarFn.from_fourier_terms(f.to_fourier_terms(), L)
    assert np.allclose(back(t), want, atol=1e-13)


def test_extrema_refined():
    f = PeriodicScalarFn.from_callable(lambda t: 2.0 + np.cos(3 * t), L)
    assert abs(f.max() - 3.0) < 1e-10
    assert abs(f.min() - 1.0) < 1e-10


def test_antiderivative_and_mean(f):
    g = f - f.mean
    G = g.antiderivative_mean_zero()
    t = np.linspace(0, L, 23)
    h = 1e-6
    fd = (G(t + h) - G(t - h)) / (2 * h)
    assert np.allclose(fd, g(t), atol=1e-7)


def test_apply_pointwise_two_functions():
    a = PeriodicScalarFn.from_callable(lambda t: 2 + np.cos(t), L)
    b = PeriodicScalarFn.from_callable(np.sin, L)
    h = apply_pointwise(np.arctan2, b, a)
    t = np.linspace(0, L, 31)
    assert np.allclose(h(t), np.arctan2(np.sin(t), 2 + np.cos(t)), atol=1e-10)


def test_grid_derivative_rows():
    n = 128
    t = np.arange(n) * (L / n)
    rows = np.stack([np.cos(t), np.sin(2 * t)])
    d = grid_derivative(rows, L)
    assert np.allclose(d[0], -np.sin(t), atol=1e-10)
    assert np.allclose(d[1], 2 * np.cos(2 * t), atol=1e-10)


def test_sample_is_spectrally_exact(f):
    n = 256
    assert np.allclose(f.sample(n), _wave(f.grid(n)), atol=1e-12)

"""Sectional cusps and Fukui-form edges.

Series coefficients for the constant profile were frozen from a symbolic
expansion of the nested integrals; quadrature values are cross-checked
against scipy's adaptive integrator as an independent route.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from isomerforge.curves import arclength_reparametrize, circle, torus_knot
from isomerforge.cusp import (CuspProfile, CuspidalEdge, build_sectional_cusp,
                              fukui_edge, standard_cusp)
from isomerforge.errors import VanishingHalfCurvature
from isomerforge.periodic import PeriodicScalarFn

L = 2 * np.pi


def test_constant_one_profile_closed_forms():
    # (A, B) = (v sin v + cos v - 1, sin v - v cos v)
    sec = build_sectional_cusp(CuspProfile.constant(1.0, L))
    v = np.linspace(-0.4, 0.4, 21)
    A, B = sec.values(0.0, v)
    assert np.allclose(A, v * np.sin(v) + np.cos(v) - 1, atol=1e-13)
    assert np.allclose(B, np.sin(v) - v * np.cos(v), atol=1e-13)


def test_quadrature_matches_scipy_for_t_dependent_profile():
    base = PeriodicScalarFn.from_fourier_terms([[0, 1.0, 0.0], [1, 0.3, 0.0]], L)
    prof = CuspProfile([base, base * 0.5], L)  # m = base(t) (1 + v/2)
    sec = build_sectional_cusp(prof)
    for t0, v0 in [(0.3, 0.25), (2.0, -0.3), (5.1, 0.15)]:
        A, B = sec.values(t0, v0)
        Aq, _ = quad(lambda w: w * np.cos(prof.lam(t0, w)), 0, v0, epsabs=1e-14)
        Bq, _ = quad(lambda w: w * np.sin(prof.lam(t0, w)), 0, v0, epsabs=1e-14)
        assert abs(A - Aq) < 1e-12
        assert abs(B - Bq) < 1e-12


def test_constant_profile_taylor_jets():
    # symbolic oracle: A = v^2/2 - m0^2 v^4/8 + m0^4 v^6/144,
    #                  B = m0 v^3/3 - m0^3 v^5/30 + ...
    m0 = 1.7
    sec = build_sectional_cusp(CuspProfile.constant(m0, L))
    grid = np.zeros(4)
    A, B = sec.jets(6, grid)
    assert np.allclose(A[2], 0.5, atol=1e-14)
    assert np.allclose(A[3], 0.0, atol=1e-14)
    assert np.allclose(A[4], -m0 ** 2 / 8, atol=1e-13)
    assert np.allclose(A[6], m0 ** 4 / 144, atol=1e-13)
    assert np.allclose(B[3], m0 / 3, atol=1e-14)
    assert np.allclose(B[5], -m0 ** 3 / 30, atol=1e-13)


def test_half_arclength_normalization_identity():
    # (A_v)^2 + (B_v)^2 = v^2 for any profile
    prof = CuspProfile.from_data(
        {"fourier_t": [[0, 1.0, 0.0], [2, 0.2, 0.1]], "poly_v": [1.0, 0.4]}, L)
    sec = build_sectional_cusp(prof)
    t = np.linspace(0, L, 8)[:, None]
    v = np.linspace(-0.3, 0.3, 11)[None, :]
    h = 1e-6
    A1, B1 = sec.values(t, v + h)
    A0, B0 = sec.values(t, v - h)
    Av = (A1 - A0) / (2 * h)
    Bv = (B1 - B0) / (2 * h)
    assert np.max(np.abs(Av ** 2 + Bv ** 2 - v ** 2)) < 1e-9


def test_vanishing_profile_rejected():
    prof = CuspProfile([PeriodicScalarFn.from_fourier_terms(
        [[1, 1.0, 0.0]], L)], L)  # m(t,0) = cos t has zeros
    with pytest.raises(VanishingHalfCurvature):
        build_sectional_cusp(prof)


def _helix_like_edge(theta=0.6):
    carrier = arclength_reparametrize(circle(1.0))
    sec = build_sectional_cusp(CuspProfile.constant(1.0, carrier.period))
    return fukui_edge(carrier, theta, sec)


def test_edge_restricts_to_carrier():
    edge = _helix_like_edge()
    t = np.linspace(0, edge.period, 65)
    f0 = edge.evaluate(t, np.zeros_like(t))
    assert np.max(np.abs(f0 - edge.carrier.position(t))) < 1e-10


def test_singular_direction_fv_vanishes():
    edge = _helix_like_edge()
    t = np.linspace(0, edge.period, 17)
    h = 1e-6
    fv = (edge.evaluate(t, h) - edge.evaluate(t, -h)) / (2 * h)
    assert np.max(np.abs(fv)) < 1e-9


def test_zero_angle_is_pure_normal_offset():
    edge = _helix_like_edge(theta=0.0)
    t = np.linspace(0, edge.period, 9)
    v = 0.2
    frame, _, _ = edge.carrier.frenet(t)
    A, B = edge.section.values(t, v)
    want = edge.carrier.position(t) + A[:, None] * frame.n + B[:, None] * frame.b
    assert np.allclose(edge.evaluate(t, v), want, atol=1e-12)


def test_rotation_periodicity_of_theta():
    e1 = _helix_like_edge(theta=0.6)
    e2 = _helix_like_edge(theta=0.6 + 2 * np.pi)
    t = np.linspace(0, e1.period, 9)
    assert np.allclose(e1.evaluate(t, 0.15), e2.evaluate(t, 0.15), atol=1e-12)


def test_theta_sign_flip_reflects_binormal_component():
    # with B = O(v^3), the b-component of f - gamma flips sign at jet order 2
    ep = _helix_like_edge(theta=0.5)
    em = _helix_like_edge(theta=-0.5)
    _, beta_p, delta_p = ep.frame_jets(2, 32)
    _, beta_m, delta_m = em.frame_jets(2, 32)
    assert np.allclose(delta_p[2], -delta_m[2], atol=1e-13)
    assert np.allclose(beta_p[2], beta_m[2], atol=1e-13)


def test_frame_jets_match_quadrature_values():
    carrier = arclength_reparametrize(torus_knot(1))
    prof = CuspProfile.from_data(
        {"fourier_t": [[0, 1.0, 0.0], [1, 0.2, 0.0]], "poly_v": [1.0, 0.3]},
        carrier.period)
    edge = fukui_edge(carrier, 0.7, build_sectional_cusp(prof))
    n = 64
    grid = carrier.x.grid(n)
    alpha, beta, delta = edge.frame_jets(6, n)
    v = 0.05
    # sum the jets and compare against the exact quadrature-based map
    frame, _, _ = carrier.frenet(grid)
    approx = (carrier.position(grid) + beta.eval(v)[:, None] * frame.n
              + delta.eval(v)[:, None] * frame.b)
    assert np.max(np.abs(alpha.eval(v))) == 0
    exact = edge.evaluate(grid, v)
    assert np.max(np.abs(approx - exact)) < 5e-10  # O(v^7) truncation


def test_nondegeneracy_check_passes_for_valid_edge():
    _helix_like_edge().check_nondegenerate()


def test_standard_cusp_chart():
    chart = standard_cusp()
    v = np.linspace(-1, 1, 5)
    assert np.allclose(chart.evaluate(0.0, v)[..., 2], v)
    assert np.allclose(chart.evaluate(0.0, v)[..., :2], 0)
    h = 1e-7
    du = (chart.evaluate(h, 0.3) - chart.evaluate(-h, 0.3)) / (2 * h)
    assert np.max(np.abs(du)) < 1e-6  # singular direction at u = 0
    u = np.linspace(-1, 1, 9)
    E, F, G = chart.fundamental_form(u, 0.0)
    assert np.allclose(E, 4 * u ** 2 + 9 * u ** 4)
    assert np.allclose(F, 0) and np.allclose(G, 1)

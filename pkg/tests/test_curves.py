"""Curve generators, Frenet machinery, reparametrization.

Expected values marked as oracle-derived were computed with independent
routes (adaptive quadrature of the exact speed, closed-form curvature of
conics) before the library paths were exercised.
"""

import numpy as np
import pytest

from isomerforge.curves import (ClosedCurve, arclength_reparametrize,
                                check_embedded, circle, curve_from_fourier,
                                frenet_from_derivatives, min_self_distance,
                                spherical_deform, torus_knot)
from isomerforge.errors import (NonPositiveCurvature, NonRegularCurve,
                                VanishingCurvature)
from isomerforge.periodic import PeriodicScalarFn

# adaptive quadrature of |gamma_m'| with symbolic derivatives (oracle)
TORUS_KNOT_LENGTH = {1: 26.013508932292158, 2: 31.898600666412335}


def test_torus_knot_value_at_zero():
    # direct evaluation of the closed form at t = 0
    g = torus_knot(1)
    assert np.allclose(g.position(0.0), [3.0, 0.0, 0.0], atol=1e-14)


def test_torus_knot_periodicity():
    g = torus_knot(3)
    t = np.linspace(0, 2 * np.pi, 11)
    assert np.allclose(g.position(t), g.position(t + 2 * np.pi), atol=1e-12)


@pytest.mark.parametrize("m", [1, 2])
def test_torus_knot_arclength_period_matches_quadrature(m):
    g = arclength_reparametrize(torus_knot(m))
    assert abs(g.period - TORUS_KNOT_LENGTH[m]) < 1e-9
    t = np.linspace(0, g.period, 257)
    sp = np.linalg.norm(g.derivative(t), axis=-1)
    assert np.max(np.abs(sp - 1)) < 1e-8


def test_torus_knot_curvature_nonconstant():
    for m in (1, 2):
        k = torus_knot(m).kappa
        t = np.linspace(0, 2 * np.pi, 512, endpoint=False)
        vals = k(t)
        assert vals.max() - vals.min() > 0.1
        assert vals.min() > 0


def test_trefoil_is_embedded():
    margin = check_embedded(torus_knot(2))
    assert margin > 0.1


def test_circle_reparametrization_is_uniform_rescale():
    # constant-speed input: period becomes 2 pi r
    r = 2.5
    g = arclength_reparametrize(circle(r))
    assert abs(g.period - 2 * np.pi * r) < 1e-10
    frame, kap, tau = g.frenet(np.linspace(0, g.period, 33))
    assert np.allclose(kap, 1 / r, atol=1e-9)
    assert np.allclose(tau, 0, atol=1e-9)


def test_reparametrize_identity_on_unit_speed():
    g = arclength_reparametrize(circle(1.0))
    again = arclength_reparametrize(g)
    assert again is g


def test_reparametrize_idempotent_numerically():
    g1 = arclength_reparametrize(torus_knot(1))
    g2 = arclength_reparametrize(g1)
    t = np.linspace(0, g1.period, 65)
    assert np.max(np.abs(g1.position(t) - g2.position(t))) < 1e-9


def test_helix_frenet_closed_form():
    # circular helix (cos(t/sqrt2), sin(t/sqrt2), t/sqrt2): kappa = tau = 1/2
    t = np.linspace(-2.0, 2.0, 41)
    s = t / np.sqrt(2)
    d1 = np.stack([-np.sin(s), np.cos(s), np.ones_like(s)], -1) / np.sqrt(2)
    d2 = np.stack([-np.cos(s), -np.sin(s), np.zeros_like(s)], -1) / 2
    d3 = np.stack([np.sin(s), -np.cos(s), np.zeros_like(s)], -1) / (2 * np.sqrt(2))
    e, n, b, kap, tau = frenet_from_derivatives(d1, d2, d3)
    assert np.allclose(kap, 0.5, atol=1e-12)
    assert np.allclose(tau, 0.5, atol=1e-12)
    assert np.allclose(np.einsum("ij,ij->i", e, n), 0, atol=1e-12)


def test_frenet_orthonormal_right_handed():
    g = arclength_reparametrize(torus_knot(2))
    t = np.linspace(0, g.period, 128, endpoint=False)
    frame, kap, tau = g.frenet(t)
    M = np.stack([frame.e, frame.n, frame.b], axis=1)
    gram = np.einsum("tik,tjk->tij", M, M)
    assert np.max(np.abs(gram - np.eye(3))) < 1e-10
    assert np.allclose(np.linalg.det(M), 1.0, atol=1e-10)


def test_frenet_kappa_matches_second_derivative_of_unit_speed():
    g = arclength_reparametrize(torus_knot(1))
    t = np.linspace(0, g.period, 100)
    _, kap, _ = g.frenet(t)
    assert np.max(np.abs(kap - np.linalg.norm(g.derivative(t, 2), axis=-1))) < 1e-6


def test_planar_curve_has_zero_torsion_constant_binormal():
    ell = curve_from_fourier(
        {"x": [[1, 1.0, 0.0]], "y": [[1, 0.0, 0.6]], "z": []}, 2 * np.pi)
    t = np.linspace(0, 2 * np.pi, 64)
    frame, kap, tau = ell.frenet(t)
    assert np.allclose(tau, 0, atol=1e-10)
    assert np.max(np.ptp(frame.b, axis=0)) < 1e-10


def test_ellipse_curvature_closed_form():
    # kappa(t) = a b / (a^2 sin^2 + b^2 cos^2)^{3/2}  (oracle)
    a, b = 1.0, 0.6
    ell = curve_from_fourier(
        {"x": [[1, a, 0.0]], "y": [[1, 0.0, b]], "z": []}, 2 * np.pi)
    t = np.linspace(0, 2 * np.pi, 37)
    want = a * b / (a ** 2 * np.sin(t) ** 2 + b ** 2 * np.cos(t) ** 2) ** 1.5
    assert np.allclose(ell.kappa(t), want, atol=1e-10)
    assert abs(ell.kappa(0.0) - 2.7777777777777777) < 1e-10


def test_curve_from_fourier_rejects_nonconvex():
    with pytest.raises(NonPositiveCurvature):
        curve_from_fourier(
            {"x": [[1, 1.0, 0.0], [2, 0.8, 0.0]], "y": [[1, 0.0, 1.0]], "z": []},
            2 * np.pi)


def test_perturbed_circle_embedded_fixed_seed():
    rng = np.random.default_rng(7)
    terms_x = [[1, 1.0, 0.0]] + [[k, 0.02 * rng.standard_normal(),
                                  0.02 * rng.standard_normal()] for k in (2, 3)]
    terms_y = [[1, 0.0, 1.0]] + [[k, 0.02 * rng.standard_normal(),
                                  0.02 * rng.standard_normal()] for k in (2, 3)]
    g = curve_from_fourier({"x": terms_x, "y": terms_y, "z": []}, 2 * np.pi)
    assert min_self_distance(g) > 1e-2


def test_nonregular_curve_rejected():
    # figure-eight-ish speed collapse
    bad = ClosedCurve(
        PeriodicScalarFn.from_callable(lambda t: np.sin(t) ** 2 / 2, 2 * np.pi),
        PeriodicScalarFn.constant(0.0, 2 * np.pi),
        PeriodicScalarFn.constant(0.0, 2 * np.pi))
    with pytest.raises(NonRegularCurve):
        arclength_reparametrize(bad)


def test_straight_segmentish_curvature_guard():
    g = curve_from_fourier({"x": [[1, 1.0, 0.0]], "y": [[1, 0.0, 1.0]], "z": []},
                           2 * np.pi)
    flatz = ClosedCurve(g.x, g.y, PeriodicScalarFn.constant(0.0, 2 * np.pi))
    with pytest.raises(VanishingCurvature):
        # near-zero curvature threshold exercised with an absurd floor
        flatz.frenet(0.0, kappa_min=10.0)


ASYM_PLANAR = {
    "x": [[1, 1.0, 0.0], [2, 0.10, 0.0], [3, 0.0, 0.05]],
    "y": [[1, 0.0, 1.0], [2, 0.0, 0.07], [3, 0.04, 0.0], [4, 0.0, 0.03]],
    "z": [],
}


def _asym_planar_unit_speed():
    return arclength_reparametrize(curve_from_fourier(ASYM_PLANAR, 2 * np.pi))


def test_spherical_deform_on_common_sphere_before_rescale():
    g = _asym_planar_unit_speed()
    u = 0.1
    # undo the final rescale, then check equidistance from (0,0,1/(2u))
    deformed = spherical_deform(g, u)
    t = np.linspace(0, g.period, 257)
    tilde = deformed.position(t) / (g.period / _pre_rescale_length(g, u))
    center = np.array([0.0, 0.0, 1 / (2 * u)])
    rad = np.linalg.norm(tilde - center, axis=-1)
    assert np.max(np.abs(rad - 1 / (2 * u))) < 1e-9


def _pre_rescale_length(g, u):
    deformed = spherical_deform(g, u)
    # output has total length = input period, so pre-rescale length is
    # recovered from the scale factor actually applied
    x, y = g.x, g.y

    def comp(t):
        px, py = x(t), y(t)
        r2 = px ** 2 + py ** 2
        D = u * u * r2 + 1.0
        return np.stack([px / D, py / D, u * r2 / D], axis=-1)

    tilde = ClosedCurve(
        PeriodicScalarFn.from_callable(lambda t: comp(t)[..., 0], g.period),
        PeriodicScalarFn.from_callable(lambda t: comp(t)[..., 1], g.period),
        PeriodicScalarFn.from_callable(lambda t: comp(t)[..., 2], g.period))
    return tilde.length


def test_spherical_deform_small_u_limit():
    g = _asym_planar_unit_speed()
    out = spherical_deform(g, 1e-3)
    t = np.linspace(0, g.period, 129)
    dist = np.max(np.linalg.norm(out.position(t) - g.position(t), axis=-1))
    assert dist <= 1e-2 * g.diameter()


def test_spherical_deform_total_length_preserved():
    g = _asym_planar_unit_speed()
    out = spherical_deform(g, 0.05)
    assert abs(out.length - g.period) < 1e-9


def test_spherical_deform_rejects_bad_input():
    g = _asym_planar_unit_speed()
    with pytest.raises(ValueError):
        spherical_deform(g, 0.0)
    tilted = ClosedCurve(g.x, g.y, PeriodicScalarFn.constant(0.3, g.period),
                         unit_speed=True)
    with pytest.raises(ValueError):
        spherical_deform(tilted, 0.1)


def test_affine_relation_tracking():
    g = arclength_reparametrize(torus_knot(1))
    h = g.compose_affine(-1, 1.25)
    rel = h.affine_relation_to(g)
    assert rel is not None
    sigma, shift = rel
    t = np.linspace(0, g.period, 17)
    assert np.allclose(h.position(t), g.position(sigma * t + shift), atol=1e-10)

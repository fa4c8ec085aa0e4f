"""Closed space curves: Frenet geometry, reparametrization, generators.

Curves are triples of Fourier-represented coordinate functions on a
common period.  Derivatives are term-wise (never finite differences),
which keeps curvature and torsion accurate enough for the third and
fourth order jets consumed downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize, minimize_scalar

from .errors import (DegenerateProjection, EmbeddednessViolation,
                     NonPositiveCurvature, NonRegularCurve,
                     ReparametrizationFailure, VanishingCurvature)
from .periodic import PeriodicScalarFn

_UNIT_SPEED_TOL = 1e-8
_KAPPA_MIN = 1e-6


@dataclass(frozen=True)
class FrenetFrame:
    """Orthonormal right-handed frame (tangent, principal normal, binormal)."""

    e: np.ndarray
    n: np.ndarray
    b: np.ndarray
    t: np.ndarray


class ClosedCurve:
    """A closed curve t -> R^3 with cached curvature and torsion.

    Instances are immutable; all evaluation methods are pure and safe to
    call concurrently.  ``base``/``affine`` track whether this curve was
    produced from another one by an affine reparametrization
    ``t -> sigma t + shift`` (used by the congruence machinery to reuse
    alignment scans).
    """

    def __init__(self, x, y, z, unit_speed=False, _base=None, _affine=(1, 0.0)):
        if not (abs(x.period - y.period) < 1e-12 * x.period
                and abs(x.period - z.period) < 1e-12 * x.period):
            raise ValueError("coordinate functions must share one period")
        self.x, self.y, self.z = x, y, z
        self.unit_speed = bool(unit_speed)
        self.base = _base if _base is not None else self
        self.affine = _affine
        self._cache = {}

    @property
    def period(self):
        return self.x.period

    # ------------------------------------------------------------------
    # evaluation

    def position(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([self.x(t), self.y(t), self.z(t)], axis=-1)

    def derivative(self, t, order=1):
        t = np.asarray(t, dtype=float)
        return np.stack([self.x.derivative(order)(t),
                         self.y.derivative(order)(t),
                         self.z.derivative(order)(t)], axis=-1)

    @property
    def speed_sq(self):
        """|gamma'|^2, exact in coefficient arithmetic (band-limited)."""
        if "speed_sq" not in self._cache:
            dx, dy, dz = (c.derivative() for c in (self.x, self.y, self.z))
            self._cache["speed_sq"] = dx * dx + dy * dy + dz * dz
        return self._cache["speed_sq"]

    @property
    def speed(self):
        if "speed" not in self._cache:
            sq = self.speed_sq
            if sq.min() <= 1e-16:
                raise NonRegularCurve(
                    f"speed^2 drops to {sq.min():.3e}: not a regular curve")
            self._cache["speed"] = sq.apply(np.sqrt)
        return self._cache["speed"]

    @property
    def length(self):
        # integral over one period of a trigonometric series is exact
        return self.speed.mean * self.period

    @property
    def kappa(self):
        if "kappa" not in self._cache:
            self._cache["kappa"] = PeriodicScalarFn.from_callable(
                lambda t: _kappa_tau_values(self, t)[0], self.period)
        return self._cache["kappa"]

    @property
    def tau(self):
        if "tau" not in self._cache:
            self._cache["tau"] = PeriodicScalarFn.from_callable(
                lambda t: _kappa_tau_values(self, t)[1], self.period)
        return self._cache["tau"]

    def diameter(self, n=512):
        p = self.position(self.x.grid(n))
        return float(np.linalg.norm(p.max(0) - p.min(0)))

    # ------------------------------------------------------------------
    # derived curves

    def compose_affine(self, sigma, shift):
        """The curve ``t -> gamma(sigma t + shift)`` (exact, coefficient level)."""
        s1, a1 = self.affine  # self(t) = base(s1 t + a1)
        return ClosedCurve(self.x.compose_affine(sigma, shift),
                           self.y.compose_affine(sigma, shift),
                           self.z.compose_affine(sigma, shift),
                           unit_speed=self.unit_speed,
                           _base=self.base,
                           _affine=(s1 * sigma, s1 * shift + a1))

    def affine_relation_to(self, other):
        """(sigma, shift) with self(t) = other(sigma t + shift), or None."""
        if self.base is not other.base:
            return None
        s1, a1 = self.affine   # self(t) = base(s1 t + a1)
        s2, a2 = other.affine  # other(t) = base(s2 t + a2)
        # other(sigma t + c) = base(s2 sigma t + s2 c + a2) = base(s1 t + a1)
        return s1 * s2, (s2 * (a1 - a2)) % self.period

    # ------------------------------------------------------------------
    # frames

    def frenet(self, t, kappa_min=_KAPPA_MIN):
        """Frenet frame, curvature and torsion at parameter value(s) t.

        Raises VanishingCurvature where the frame is undefined.
        """
        t = np.asarray(t, dtype=float)
        e, n, b, kap, tau = frenet_from_derivatives(
            self.derivative(t, 1), self.derivative(t, 2),
            self.derivative(t, 3), kappa_min=kappa_min)
        return FrenetFrame(e=e, n=n, b=b, t=t), kap, tau


def frenet_from_derivatives(d1, d2, d3, kappa_min=_KAPPA_MIN):
    """Frame and invariants from the first three derivative vectors.

    Works for any regular parametrization (not necessarily unit speed):
    kappa = |d1 x d2| / |d1|^3 and tau = <d1 x d2, d3> / |d1 x d2|^2.
    """
    sp = np.linalg.norm(d1, axis=-1)
    if np.min(sp) <= 1e-12:
        raise NonRegularCurve("zero speed: Frenet frame undefined")
    e = d1 / sp[..., None]
    cr = np.cross(d1, d2)
    ncr = np.linalg.norm(cr, axis=-1)
    kap = ncr / sp ** 3
    if np.min(kap) < kappa_min:
        raise VanishingCurvature(
            f"curvature {np.min(kap):.3e} below threshold {kappa_min:.1e}")
    b = cr / ncr[..., None]
    n = np.cross(b, e)
    tau = np.einsum("...i,...i->...", cr, d3) / ncr ** 2
    return e, n, b, kap, tau


def _kappa_tau_values(curve, t):
    d1 = curve.derivative(t, 1)
    d2 = curve.derivative(t, 2)
    d3 = curve.derivative(t, 3)
    cr = np.cross(d1, d2)
    ncr = np.linalg.norm(cr, axis=-1)
    sp = np.linalg.norm(d1, axis=-1)
    kap = ncr / sp ** 3
    tau = np.einsum("...i,...i->...", cr, d3) / np.maximum(ncr ** 2, 1e-300)
    return kap, tau


def frenet(curve, t, kappa_min=_KAPPA_MIN):
    """Frame plus (kappa, tau); thin functional wrapper over the method."""
    frame, kap, tau = curve.frenet(t, kappa_min)
    return frame, kap, tau


# ----------------------------------------------------------------------
# generators


def _fold_terms(terms):
    """Fold negative harmonics into the k >= 0 convention."""
    out = {}
    for k, a, b in terms:
        if k < 0:
            k, a, b = -k, a, -b
        key = int(k)
        ca, cb = out.get(key, (0.0, 0.0))
        out[key] = (ca + a, cb + b)
    return [[k, a, b] for k, (a, b) in sorted(out.items())]


def torus_knot(m):
    """The 2pi-periodic knot ((2+cos nt) cos 2t, (2+cos nt) sin 2t, sin nt).

    ``n = 2m - 1``; m = 1 is an unknotted loop, m = 2 a trefoil.
    Coefficients are exact (products of cosines expanded by hand).
    """
    if m < 1 or int(m) != m:
        raise ValueError("m must be a positive integer")
    n = 2 * m - 1
    x_terms = _fold_terms([[2, 2.0, 0.0], [n + 2, 0.5, 0.0], [n - 2, 0.5, 0.0]])
    y_terms = _fold_terms([[2, 0.0, 2.0], [n + 2, 0.0, 0.5], [n - 2, 0.0, -0.5]])
    z_terms = _fold_terms([[n, 0.0, 1.0]])
    L = 2 * np.pi
    return ClosedCurve(PeriodicScalarFn.from_fourier_terms(x_terms, L),
                       PeriodicScalarFn.from_fourier_terms(y_terms, L),
                       PeriodicScalarFn.from_fourier_terms(z_terms, L))


def circle(radius=1.0):
    L = 2 * np.pi
    return ClosedCurve(
        PeriodicScalarFn.from_fourier_terms([[1, radius, 0.0]], L),
        PeriodicScalarFn.from_fourier_terms([[1, 0.0, radius]], L),
        PeriodicScalarFn.constant(0.0, L))


def curve_from_fourier(coeffs, period, kappa_min=_KAPPA_MIN):
    """Build a curve from ``{"x": [[k, a, b], ...], "y": ..., "z": ...}``.

    Raises NonPositiveCurvature if the curvature dips below threshold.
    """
    fx = PeriodicScalarFn.from_fourier_terms(coeffs["x"], period)
    fy = PeriodicScalarFn.from_fourier_terms(coeffs["y"], period)
    fz = PeriodicScalarFn.from_fourier_terms(coeffs.get("z", [[0, 0.0, 0.0]]), period)
    curve = ClosedCurve(fx, fy, fz)
    # grid scan with local refinement: a curvature zero between grid nodes
    # must still be caught, and a vanishing kappa would make the spectral
    # fit of curve.kappa diverge later
    n = 1024
    grid = curve.x.grid(n)
    kap, _ = _kappa_tau_values(curve, grid)
    i = int(np.argmin(kap))
    h = period / n
    res = minimize_scalar(lambda s: _kappa_tau_values(curve, np.array([s]))[0][0],
                          bounds=(grid[i] - h, grid[i] + h), method="bounded",
                          options={"xatol": 1e-12})
    kmin = min(float(np.min(kap)), float(res.fun))
    if kmin < kappa_min:
        raise NonPositiveCurvature(
            f"min curvature {kmin:.3e} below threshold {kappa_min:.1e}")
    return curve


def arclength_reparametrize(curve, *, speed_min=1e-8, n_check=512,
                            unit_tol=_UNIT_SPEED_TOL, max_modes=1 << 13):
    """Reparametrize by arc length; same image and orientation.

    The inverse parameter t(s) solves dt/ds = 1/|gamma'(t)| with a tight
    adaptive Runge-Kutta integration; the (tiny) closure defect is
    distributed linearly over the period before resampling.
    """
    if curve.speed_sq.min() < speed_min ** 2:
        raise NonRegularCurve(
            f"speed drops to {max(curve.speed_sq.min(), 0.0) ** 0.5:.3e}")
    sp = curve.speed
    if abs(sp.max() - 1) < unit_tol and abs(sp.min() - 1) < unit_tol:
        if curve.unit_speed:
            return curve
        return ClosedCurve(curve.x, curve.y, curve.z, unit_speed=True,
                           _base=curve.base, _affine=curve.affine)
    L = curve.length
    sol = solve_ivp(lambda s, t: 1.0 / sp(t[0]), (0.0, L), [0.0],
                    method="DOP853", rtol=1e-12, atol=1e-12, dense_output=True)
    if not sol.success:
        raise ReparametrizationFailure(sol.message)
    # Newton polish against the exact (term-wise) arc-length integral: the
    # dense ODE output alone carries interpolation error between steps.
    osc = (sp - sp.mean).antiderivative_mean_zero()
    osc0 = osc(0.0)

    def arc(t):
        return sp.mean * t + osc(t) - osc0

    def t_of_s(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = sol.sol(s)[0]
        for _ in range(4):
            t = t - (arc(t) - s) / sp(t)
        return t

    drift = t_of_s(np.array([L]))[0] - curve.period
    if abs(drift) > 1e-8 * curve.period:
        raise ReparametrizationFailure(f"closure drift {drift:.3e}")

    n = 256
    while True:
        s = np.arange(n) * (L / n)
        ts = t_of_s(s)
        pos = curve.position(ts)
        new = ClosedCurve(PeriodicScalarFn.from_samples(pos[:, 0], L),
                          PeriodicScalarFn.from_samples(pos[:, 1], L),
                          PeriodicScalarFn.from_samples(pos[:, 2], L),
                          unit_speed=True)
        dev = max(abs(new.speed.max() - 1), abs(new.speed.min() - 1))
        if dev < unit_tol:
            return new
        if n >= max_modes:
            raise ReparametrizationFailure(
                f"unit-speed deviation {dev:.3e} at n={n}")
        n *= 2


def spherical_deform(planar_curve, u, *, u_max=1.0, pole_margin=1e6,
                     planar_tol=1e-9):
    """Deform a unit-speed planar curve through inverse stereographic maps.

    The output lies (before the final rescale) on the sphere of radius
    1/(2u) centered at (0, 0, 1/(2u)), and is rescaled to keep the total
    length of the input.  It converges to the input as u -> 0.
    """
    if not planar_curve.unit_speed:
        raise ValueError("input must be unit-speed (reparametrize first)")
    if not 0 < abs(u) < u_max:
        raise ValueError(f"need 0 < |u| < {u_max}")
    l = planar_curve.period
    pts = planar_curve.position(planar_curve.x.grid(64))
    if np.max(np.abs(pts[:, 2])) > planar_tol * max(1.0, planar_curve.diameter()):
        raise ValueError("input curve must lie in the plane z = 0")
    rmax = np.max(np.hypot(pts[:, 0], pts[:, 1]))
    if abs(u) * rmax > pole_margin:
        raise DegenerateProjection("curve maps too close to the projection pole")

    x, y = planar_curve.x, planar_curve.y

    def deformed(t):
        px, py = x(t), y(t)
        r2 = px ** 2 + py ** 2
        D = u * u * r2 + 1.0
        return np.stack([px / D, py / D, u * r2 / D], axis=-1)

    tilde = ClosedCurve(
        PeriodicScalarFn.from_callable(lambda t: deformed(t)[..., 0], l),
        PeriodicScalarFn.from_callable(lambda t: deformed(t)[..., 1], l),
        PeriodicScalarFn.from_callable(lambda t: deformed(t)[..., 2], l))
    scale = l / tilde.length
    return ClosedCurve(tilde.x * scale, tilde.y * scale, tilde.z * scale)


# ----------------------------------------------------------------------
# embeddedness


def min_self_distance(curve, n=512, exclude_fraction=1 / 16, refine=True):
    """Minimum distance between parameter-distant points of the curve.

    Coarse pairwise scan excluding near-diagonal pairs, then local
    refinement of the best candidates.
    """
    t = curve.x.grid(n)
    p = curve.position(t)
    d2 = np.sum((p[:, None, :] - p[None, :, :]) ** 2, axis=-1)
    idx = np.arange(n)
    circ = np.abs(idx[:, None] - idx[None, :])
    circ = np.minimum(circ, n - circ)
    mask = circ >= max(2, int(n * exclude_fraction))
    d2 = np.where(mask, d2, np.inf)
    i, j = np.unravel_index(np.argmin(d2), d2.shape)
    best = float(np.sqrt(d2[i, j]))
    if not refine:
        return best
    L = curve.period

    def obj(st):
        q = curve.position(np.asarray(st))
        return float(np.sum((q[0] - q[1]) ** 2))

    res = minimize(obj, x0=[t[i], t[j]], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-20})
    sep = abs(res.x[0] - res.x[1]) % L
    sep = min(sep, L - sep)
    if sep > L * exclude_fraction / 2:
        best = min(best, float(np.sqrt(res.fun)))
    return best


def check_embedded(curve, threshold_rel=1e-4):
    margin = min_self_distance(curve)
    floor = threshold_rel * curve.diameter()
    if margin < floor:
        raise EmbeddednessViolation(
            f"min self-distance {margin:.3e} below {floor:.3e}")
    return margin

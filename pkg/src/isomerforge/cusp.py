"""Sectional cusp profiles and cuspidal edges along closed curves.

An edge in closed form is built from three ingredients: a unit-speed
carrier curve, a cuspidal angle function theta(t), and a cusp profile
m(t, v) whose nested integrals produce the planar section (A, B) in
normalized half-arc-length form.  The edge map is

    f(t, v) = gamma(t) + (A cos th + B sin th) n(t) + (B cos th - A sin th) b(t)

with (n, b) the principal normal and binormal of the carrier.  Sections
are evaluated two independent ways: nested Gauss-Legendre quadrature
with error control (for surface values) and truncated series arithmetic
(for the jets the metric module consumes).
"""

from __future__ import annotations

import numpy as np

from .errors import VanishingHalfCurvature
from .periodic import PeriodicScalarFn
from .vjet import VJet

_COND_C_TOL = 1e-6  # threshold for the non-degeneracy checks


class CuspProfile:
    """Extended half-cuspidal curvature m(t, v) = sum_j p_j(t) v^j.

    ``p_j`` are periodic in t; the polynomial order in v is finite.
    """

    def __init__(self, coeffs_t, period):
        if not coeffs_t:
            raise ValueError("profile needs at least the constant-in-v term")
        self.coeffs_t = list(coeffs_t)
        self.period = float(period)

    @classmethod
    def constant(cls, value, period):
        return cls([PeriodicScalarFn.constant(value, period)], period)

    @classmethod
    def from_data(cls, data, period):
        """Build from ``{"constant": c}`` or
        ``{"fourier_t": [[k, a, b], ...], "poly_v": [c0, c1, ...]}``.

        In the second form ``m(t, v) = base(t) * (c0 + c1 v + ...)`` with
        ``base`` given by the Fourier terms (use ``[[0, 1, 0]]`` for 1).
        """
        if "constant" in data:
            return cls.constant(float(data["constant"]), period)
        base = PeriodicScalarFn.from_fourier_terms(data["fourier_t"], period)
        poly = data.get("poly_v", [1.0])
        return cls([base * float(c) for c in poly], period)

    def __call__(self, t, v):
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        acc = np.zeros(np.broadcast(t, v).shape)
        for j in reversed(range(len(self.coeffs_t))):
            acc = acc * v + self.coeffs_t[j](t)
        return acc

    def lam(self, t, v):
        """lambda(t, v) = int_0^v m(t, w) dw, closed form."""
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        acc = np.zeros(np.broadcast(t, v).shape)
        for j in reversed(range(len(self.coeffs_t))):
            acc = acc * v + self.coeffs_t[j](t) / (j + 1)
        return acc * v

    def edge_values(self, t):
        """m(t, 0) on the given parameter values."""
        return self.coeffs_t[0](np.asarray(t, dtype=float))

    def jet(self, order, grid):
        """VJet of m in v with coefficient rows sampled on ``grid``."""
        rows = []
        for j in range(order + 1):
            if j < len(self.coeffs_t):
                rows.append(self.coeffs_t[j](grid))
            else:
                rows.append(np.zeros_like(np.asarray(grid, dtype=float)))
        return VJet(rows, order)

    def check_nonvanishing(self, n=512, tol=_COND_C_TOL):
        grid = np.arange(n) * (self.period / n)
        m0 = self.edge_values(grid)
        if np.min(np.abs(m0)) < tol:
            raise VanishingHalfCurvature(
                f"|m(t,0)| dips to {np.min(np.abs(m0)):.3e}")


class SectionalCusp:
    """The planar cusp (A, B)(t, v) derived from a profile.

    A(t,v) = int_0^v w cos(lambda(t,w)) dw,
    B(t,v) = int_0^v w sin(lambda(t,w)) dw,  lambda = int_0^v m.

    By construction A_v^2 + B_v^2 = v^2 (half-arc-length normalization).
    """

    def __init__(self, profile, eps=0.2):
        profile.check_nonvanishing()
        self.profile = profile
        self.eps = float(eps)

    @property
    def period(self):
        return self.profile.period

    def values(self, t, v, tol=1e-12, nodes=24):
        """A, B by nested Gauss-Legendre quadrature with error control.

        Compares the ``nodes``-point rule against the doubled rule and
        subdivides until the difference is below ``tol``.
        """
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        a1, b1 = self._gl_pass(t, v, nodes, panels=1)
        panels = 1
        while True:
            a2, b2 = self._gl_pass(t, v, 2 * nodes, panels=panels)
            err = max(np.max(np.abs(a2 - a1)), np.max(np.abs(b2 - b1)))
            if err < tol or panels >= 16:
                return a2, b2
            a1, b1 = a2, b2
            panels *= 2

    def _gl_pass(self, t, v, nodes, panels):
        x, w = np.polynomial.legendre.leggauss(nodes)
        A = np.zeros(np.broadcast(t, v).shape)
        B = np.zeros_like(A)
        for p in range(panels):
            lo = p / panels
            hi = (p + 1) / panels
            # map [-1,1] -> [lo,hi] fraction of [0, v]
            frac = (lo + hi) / 2 + x * (hi - lo) / 2
            for q in range(nodes):
                wq = v * frac[q]
                lam = self.profile.lam(t, wq)
                weight = w[q] * (hi - lo) / 2 * v
                A = A + weight * wq * np.cos(lam)
                B = B + weight * wq * np.sin(lam)
        return A, B

    def jets(self, order, grid):
        """A, B as VJets over the t-grid, from profile series."""
        mjet = self.profile.jet(order, grid)
        lam = mjet.integrate_v()
        C, S = lam.cos_sin()
        A = C.shift_up(1).integrate_v()
        B = S.shift_up(1).integrate_v()
        return A, B


def build_sectional_cusp(profile, eps=0.2):
    """Validated constructor; raises VanishingHalfCurvature on bad profiles."""
    return SectionalCusp(profile, eps)


class CuspidalEdge:
    """A cuspidal edge along a closed unit-speed carrier.

    Either closed-form data (theta + section, evaluated through the
    rotation formula) or a truncated jet expansion (``jets`` attribute,
    an object exposing ``evaluate`` and ``frame_jets``).
    """

    def __init__(self, carrier, theta=None, section=None, jets=None, eps=0.2):
        if not carrier.unit_speed:
            raise ValueError("carrier must be unit-speed")
        self.carrier = carrier
        self.theta = theta
        self.section = section
        self.jets = jets
        self.eps = float(eps)
        self._cache = {}
        if (theta is None or section is None) and jets is None:
            raise ValueError("need either (theta, section) or jets")

    @property
    def is_closed_form(self):
        return self.jets is None

    @property
    def period(self):
        return self.carrier.period

    def evaluate(self, t, v):
        """The edge map f(t, v); shapes of t and v broadcast."""
        if not self.is_closed_form:
            return self.jets.evaluate(t, v)
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        A, B = self.section.values(t, v)
        th = self.theta(t)
        P = A * np.cos(th) + B * np.sin(th)
        Q = B * np.cos(th) - A * np.sin(th)
        frame, _, _ = self.carrier.frenet(t)
        pos = self.carrier.position(t)
        return pos + P[..., None] * frame.n + Q[..., None] * frame.b

    def frame_jets(self, order, n):
        """Displacement jets (alpha, beta, delta) in the carrier frame.

        Returns (alpha, beta, delta) as VJets with rows over the uniform
        t-grid of size n; the edge is gamma + alpha e + beta n + delta b
        with each component a truncated series in v.
        """
        key = (order, n)
        if key in self._cache:
            return self._cache[key]
        if not self.is_closed_form:
            out = self.jets.frame_jets(order, n)
        else:
            grid = self.carrier.x.grid(n)
            A, B = self.section.jets(order, grid)
            th = self.theta(grid)
            P = A * np.cos(th) + B * np.sin(th)
            Q = B * np.cos(th) - A * np.sin(th)
            out = (VJet.zero(order, (n,)), P, Q)
        self._cache[key] = out
        return out

    def check_nondegenerate(self, n=256, tol=_COND_C_TOL):
        """A_vv(t,0) != 0 and B_vvv(t,0) != 0 on the grid (condition on cusps)."""
        _, beta, delta = self.frame_jets(3, n)
        if self.theta is not None:
            th = self.theta(self.carrier.x.grid(n))
        else:
            th = np.arctan2(-delta[2], beta[2])
        A2 = beta[2] * np.cos(th) - delta[2] * np.sin(th)
        B3 = beta[3] * np.sin(th) + delta[3] * np.cos(th)
        if np.min(np.abs(A2)) < tol / 2:
            raise VanishingHalfCurvature("A_vv(t,0) vanishes on the grid")
        if np.min(np.abs(B3)) < tol:
            raise VanishingHalfCurvature("B_vvv(t,0) vanishes on the grid")


def fukui_edge(carrier, theta, section, eps=None):
    """Closed-form edge from carrier, angle, and a validated section."""
    if np.isscalar(theta):
        theta = PeriodicScalarFn.constant(float(theta), carrier.period)
    # positive curvature is required for the frame along the whole curve
    carrier.frenet(carrier.x.grid(64))
    edge = CuspidalEdge(carrier, theta=theta, section=section,
                        eps=section.eps if eps is None else eps)
    # half-arc-length sections and a purely normal displacement: this is
    # already the normal form with respect to gamma(0)
    edge.is_normal_form = True
    return edge


class StandardCuspChart:
    """The model map (u, v) -> (u^2, u^3, v) on a rectangle chart.

    Here u is the cusp direction and v runs along the edge; the singular
    set is u = 0.  This is a non-closed chart used as a reference model.
    """

    def evaluate(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        z = np.broadcast(u, v)
        return np.stack([np.broadcast_to(u ** 2, z.shape),
                         np.broadcast_to(u ** 3, z.shape),
                         np.broadcast_to(v, z.shape)], axis=-1)

    def fundamental_form(self, u, v):
        """(E, F, G) with E the u-u coefficient: (4u^2 + 9u^4, 0, 1)."""
        u = np.asarray(u, dtype=float)
        E = 4 * u ** 2 + 9 * u ** 4
        return E, np.zeros_like(E), np.ones_like(E)


def standard_cusp():
    return StandardCuspChart()

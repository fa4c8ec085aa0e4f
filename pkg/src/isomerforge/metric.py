"""First fundamental forms as jets along the singular curve.

The metric of an edge f is E dt^2 + 2 F dt dv + G dv^2 with
E = f_t . f_t, F = f_t . f_v, G = f_v . f_v.  Everything here works on
v-jets whose coefficients are functions of t: the edge contributes its
displacement jets in the carrier's Frenet frame, and the frame equations
convert t-derivatives of those jets into metric jets without ever
touching a finite difference.

A metric qualifies as a (periodic) Kossowski metric when it degenerates
along v = 0 the right way: F and G vanish there, E_v(t,0) = 2 F_t(t,0),
G_t(t,0) = G_v(t,0) = 0, and E G - F^2 is the square of a function
lambda with lambda(t,0) = 0 and lambda_v(t,0) != 0.  The singular
curvature is then computable from the jets alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (AdmissibilityViolation, AngleRecoveryFailure,
                     KossowskiViolation, OrientationError)
from .periodic import PeriodicScalarFn, grid_derivative
from .vjet import VJet, dot3

_DEFAULT_ORDER = 4
_DEFAULT_GRID = 512


def frame_derivative(comp, kap, tau, period):
    """d/dt of a Frenet-frame vector field (a e + b n + c bnorm).

    Rows follow the frame equations e' = kappa n, n' = -kappa e + tau b,
    b' = -tau n, so the component derivative is
    (a' - kappa b, kappa a + b' - tau c, tau b + c').
    """
    a, b, c = comp
    at, bt, ct = a.d_dt(period), b.d_dt(period), c.d_dt(period)
    return (at - kap * b, kap * a + bt - tau * c, tau * b + ct)


def metric_jets_from_frame_jets(alpha, beta, delta, kap, tau, period):
    """(E, F, G) jets of gamma + alpha e + beta n + delta b.

    ``kap``/``tau`` are curvature and torsion rows on the same grid as
    the jet coefficient rows.  The tangent contributes 1 + <e, W'> terms
    through unit speed of the carrier.
    """
    order = alpha.order
    W = (alpha, beta, delta)
    Wt = frame_derivative(W, kap, tau, period)
    ft = (Wt[0] + 1.0, Wt[1], Wt[2])
    fv = (alpha.d_dv(), beta.d_dv(), delta.d_dv())
    E = dot3(ft, ft).truncate(order)
    F = dot3(ft, fv).truncate(order)
    G = dot3(fv, fv).truncate(order)
    return E, F, G


class KossowskiMetric:
    """Jets E^(k), F^(k), G^(k) (k = 0..N) plus the area density jets.

    ``E``/``F``/``G`` are lists of PeriodicScalarFn per v-order; ``lam``
    holds the series square root of E G - F^2 with lam^(1) > 0.
    """

    def __init__(self, E, F, G, lam, period, order, grid_size):
        self.E, self.F, self.G, self.lam = E, F, G, lam
        self.period = float(period)
        self.order = int(order)
        self.grid_size = int(grid_size)

    @classmethod
    def from_jets(cls, Ej, Fj, Gj, period, validate=True, tol=1e-8):
        """Build from VJets with rows over the uniform grid."""
        n = Ej[0].shape[-1] if Ej[0].ndim else 1
        order = Ej.order
        lam_rows, issues = _area_density(Ej, Fj, Gj, tol)
        if validate:
            issues += _kossowski_issues(Ej, Fj, Gj, period, tol)
            if issues:
                raise KossowskiViolation(
                    "; ".join(msg for msg, _ in issues), details=issues)
        mk = lambda rows: [PeriodicScalarFn.from_samples(np.broadcast_to(r, (n,)), period)
                           for r in rows]
        return cls(mk(Ej.coeffs), mk(Fj.coeffs), mk(Gj.coeffs), mk(lam_rows),
                   period, order, n)

    def jets_rows(self, n=None):
        """(E, F, G) as VJets with rows on a grid of size n."""
        n = n or self.grid_size
        grab = lambda fns: VJet([f.sample(n) for f in fns], self.order)
        return grab(self.E), grab(self.F), grab(self.G)

    def lam_rows(self, n=None):
        n = n or self.grid_size
        return VJet([f.sample(n) for f in self.lam], self.order)


def _area_density(Ej, Fj, Gj, tol):
    """lambda jets from the series square root of E G - F^2, lam^(1) > 0."""
    order = Ej.order
    D = (Ej * Gj - Fj * Fj).truncate(order)
    issues = []
    scale = max(float(np.max(np.abs(D.coeffs[min(2, order)]))), 1.0)
    for k in (0, 1):
        if k <= order and np.max(np.abs(D.coeffs[k])) > tol * scale:
            issues.append((f"(b): EG - F^2 has order-{k} term", k))
    if order >= 2:
        core = VJet(D.coeffs[2:], order - 2)
        if np.min(core.coeffs[0]) <= 0:
            raise OrientationError(
                "EG - F^2 is not positive at second order: lambda_v undefined")
        lam_core = core.sqrt()
        lam_rows = [np.zeros_like(lam_core.coeffs[0])] + lam_core.coeffs[:order]
    else:
        lam_rows = [np.zeros_like(D.coeffs[0])] * (order + 1)
    return lam_rows, issues


def _kossowski_issues(Ej, Fj, Gj, period, tol):
    issues = []
    scale = max(float(np.max(np.abs(Ej.coeffs[0]))), 1.0)

    def check(rows, label):
        dev = float(np.max(np.abs(rows)))
        if dev > tol * scale:
            issues.append((f"{label} (max dev {dev:.2e})", dev))

    check(Fj.coeffs[0], "(a): F(t,0) != 0")
    check(Gj.coeffs[0], "(a): G(t,0) != 0")
    if Ej.order >= 1:
        ft = grid_derivative(np.broadcast_to(Fj.coeffs[0], Ej.coeffs[1].shape),
                             period) if Fj.coeffs[0].ndim else 0.0
        check(Ej.coeffs[1] - 2 * ft, "(a): E_v(t,0) != 2 F_t(t,0)")
        check(Gj.coeffs[1], "(a): G_v(t,0) != 0")
    if Gj.coeffs[0].ndim:
        check(grid_derivative(Gj.coeffs[0], period), "(a): G_t(t,0) != 0")
    return issues


def first_fundamental_form(edge, order=_DEFAULT_ORDER, n=_DEFAULT_GRID,
                           validate=True):
    """Metric jets of an edge, validated as a periodic Kossowski metric."""
    from .curves import _kappa_tau_values

    alpha, beta, delta = edge.frame_jets(order, n)
    grid = edge.carrier.x.grid(n)
    kap, tau = _kappa_tau_values(edge.carrier, grid)
    Ej, Fj, Gj = metric_jets_from_frame_jets(alpha, beta, delta, kap, tau,
                                             edge.period)
    return KossowskiMetric.from_jets(Ej, Fj, Gj, edge.period, validate=validate)


def metric_from_invariant_data(kappa, tau, theta, profile, order=_DEFAULT_ORDER,
                               n=_DEFAULT_GRID, period=None, validate=True):
    """Metric jets from invariant data alone (no explicit carrier).

    Useful for edges with constant invariant profiles (helix-type
    fixtures) where curvature, torsion, angle and cusp profile are given
    but the carrier is not closed.  Scalars are promoted to constants.
    """
    period = period or getattr(kappa, "period", None) or profile.period
    grid = np.arange(n) * (period / n)
    rows = lambda f: (np.full(n, float(f)) if np.isscalar(f) else f(grid))
    kap, tau_r, th = rows(kappa), rows(tau), rows(theta)
    from .cusp import SectionalCusp
    sec = SectionalCusp(profile)
    A, B = sec.jets(order, grid)
    P = A * np.cos(th) + B * np.sin(th)
    Q = B * np.cos(th) - A * np.sin(th)
    Ej, Fj, Gj = metric_jets_from_frame_jets(VJet.zero(order, (n,)), P, Q,
                                             kap, tau_r, period)
    return KossowskiMetric.from_jets(Ej, Fj, Gj, period, validate=validate)


def singular_curvature(metric, n=None):
    """kappa_s(t) from the stored jets (intrinsic formula).

    kappa_s = (-F_v E_t + 2 E F_tv - E E_vv) / (2 E^{3/2} lambda_v)
    evaluated at v = 0, all ingredients read off the jets.
    """
    n = n or metric.grid_size
    E0 = metric.E[0].sample(n)
    E1t = grid_derivative(E0, metric.period)
    F1 = metric.F[1].sample(n)
    F1t = grid_derivative(F1, metric.period)
    E2 = metric.E[2].sample(n)
    lam1 = metric.lam[1].sample(n)
    if np.min(lam1) <= 0:
        if np.max(lam1) <= 0:
            raise OrientationError("lambda_v(t,0) < 0: flip the orientation")
        raise OrientationError("lambda_v(t,0) changes sign or vanishes")
    num = -F1 * E1t + 2 * E0 * F1t - 2 * E0 * E2
    return PeriodicScalarFn.from_samples(num / (2 * E0 ** 1.5 * lam1),
                                         metric.period)


@dataclass(frozen=True)
class EdgeInvariants:
    """Singular curvature, limiting normal curvature, cuspidal angle."""

    kappa_s: PeriodicScalarFn
    kappa_nu: PeriodicScalarFn
    theta: PeriodicScalarFn


def invariants_from_edge(edge, n=_DEFAULT_GRID, tol=1e-10):
    """(kappa_s, kappa_nu, theta), mutually consistent.

    For closed-form edges theta is given; for jet-backed edges it is
    recovered from the order-2 displacement in the normal plane.  The
    angle is reduced by full turns so its mean lies in (-pi, pi]
    (pointwise wrapping would break continuity).
    """
    from .curves import _kappa_tau_values

    grid = edge.carrier.x.grid(n)
    kap, _ = _kappa_tau_values(edge.carrier, grid)
    if edge.theta is not None:
        th = edge.theta(grid)
        turns = np.floor((np.mean(th) + np.pi) / (2 * np.pi))
        th = th - 2 * np.pi * turns
    else:
        _, beta, delta = edge.frame_jets(2, n)
        r = np.hypot(beta[2], delta[2])
        if np.min(r) < tol:
            raise AngleRecoveryFailure(
                f"normal-plane second-order displacement dips to {np.min(r):.2e}")
        th = np.arctan2(-delta[2], beta[2])
    period = edge.period
    mk = PeriodicScalarFn.from_samples
    return EdgeInvariants(kappa_s=mk(kap * np.cos(th), period),
                          kappa_nu=mk(kap * np.sin(th), period),
                          theta=mk(th, period))


def admissible(arg, n=_DEFAULT_GRID):
    """Whether max |kappa_s| < min kappa, and the margin between them.

    ``arg`` is either an edge or a pair (kappa_s, kappa).  Extrema are
    grid-scanned then refined, so the margin is a global comparison.
    """
    if isinstance(arg, tuple):
        kappa_s, kappa = arg
    else:
        inv = invariants_from_edge(arg, n=n)
        kappa_s, kappa = inv.kappa_s, arg.carrier.kappa
    margin = kappa.min(n) - kappa_s.sup_norm(n)
    return margin > 0, float(margin)


def require_admissible(arg, n=_DEFAULT_GRID):
    ok, margin = admissible(arg, n)
    if not ok:
        raise AdmissibilityViolation(
            f"max|kappa_s| exceeds min kappa by {-margin:.3e}")
    return margin

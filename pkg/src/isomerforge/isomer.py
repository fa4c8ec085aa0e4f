"""Isometric isomers: jet reconstruction, normal forms, the four families.

The reconstruction solves for an edge f(t,v) = gamma(t) + sum c_k(t) v^k
whose fundamental form matches prescribed Kossowski jets.  Writing
c_k = alpha_k e + beta_k n + delta_k b in the carrier frame, the metric
jets decompose order by order as

    F^(k-1) = k alpha_k            + known lower-order terms
    E^(k)   = 2(alpha_k' - kappa beta_k) + known terms
    G^(k)   = 4k <c_2, c_k>        + known terms        (k >= 3)

so each order is a triangular solve: alpha_k from F, then beta_k from E
(using the spectral derivative of alpha_k), then delta_k from G through
the c_2 component.  Matching therefore consumes F at orders 1..N-1 and
E, G at orders 2..N; E^(0) = 1 and E^(1) = 0 are consistency checks.
At order two the G-equation only determines |c_2|; the leftover binormal
sign is exactly the f_+/f_- dichotomy and fixes the sign of the limiting
normal curvature sign * sqrt(kappa^2 - kappa_s^2).

Pointwise |kappa_s(t)| < kappa(t) is what keeps the order-2 solve away
from its singular locus; the global max/min comparison additionally
allows the carrier to be shifted and reversed, giving the four
one-parameter families of mutually isometric edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cusp import CuspidalEdge
from .errors import (AdmissibilityViolation, JetSolveFailure,
                     NormalFormFailure, PointwiseAdmissibilityViolation)
from .metric import (KossowskiMetric, first_fundamental_form,
                     metric_jets_from_frame_jets, require_admissible,
                     singular_curvature)
from .periodic import PeriodicScalarFn, grid_derivative
from .vjet import VJet

_DEFAULT_ORDER = 4
_DEFAULT_GRID = 512


@dataclass(frozen=True)
class IsomerSpec:
    """Family index i in {1,2,3,4} and base shift a in [0, l).

    sigma gives the carrier orientation (+1 for families 1, 2; -1 for
    3, 4), sigma_prime the sign of the limiting normal curvature (+1 for
    1, 3; -1 for 2, 4).
    """

    i: int
    a: float = 0.0

    def __post_init__(self):
        if self.i not in (1, 2, 3, 4):
            raise ValueError("family index must be 1, 2, 3 or 4")

    @property
    def sigma(self):
        return 1 if self.i in (1, 2) else -1

    @property
    def sigma_prime(self):
        return 1 if self.i in (1, 3) else -1


class JetSeries:
    """Taylor data gamma(t) + sum_{k=2..N} c_k(t) v^k in the Frenet frame.

    Coefficient functions are stored as periodic functions; rows over a
    uniform grid are materialized on demand.  c_1 = 0 always (the v = 0
    curve is singular), and |c_2| > 0 (non-degenerate cusp direction).
    """

    def __init__(self, carrier, alpha, beta, delta, order):
        self.carrier = carrier
        self.alpha, self.beta, self.delta = alpha, beta, delta
        self.order = int(order)
        if len(alpha) != order + 1:
            raise ValueError("need coefficient functions for orders 0..N")

    @classmethod
    def from_rows(cls, carrier, alpha_rows, beta_rows, delta_rows, order):
        period = carrier.period
        mk = lambda rows: [PeriodicScalarFn.from_samples(r, period) for r in rows]
        return cls(carrier, mk(alpha_rows), mk(beta_rows), mk(delta_rows), order)

    def frame_jets(self, order, n):
        if order > self.order:
            raise ValueError(f"stored order {self.order} < requested {order}")
        rows = lambda fns: VJet([f.sample(n) for f in fns[:order + 1]], order)
        return rows(self.alpha), rows(self.beta), rows(self.delta)

    def evaluate(self, t, v):
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        frame, _, _ = self.carrier.frenet(t)
        shape = np.broadcast(t, v).shape
        out = np.broadcast_to(self.carrier.position(t), shape + (3,)).copy()
        for k in range(2, self.order + 1):
            vk = np.asarray(v ** k)
            out = out + vk[..., None] * (
                np.asarray(self.alpha[k](t))[..., None] * frame.e
                + np.asarray(self.beta[k](t))[..., None] * frame.n
                + np.asarray(self.delta[k](t))[..., None] * frame.b)
        return out

    def check_invariants(self, n=256, tol=1e-8):
        a1 = self.alpha[1].sup_norm()
        b1 = self.beta[1].sup_norm()
        d1 = self.delta[1].sup_norm()
        if max(a1, b1, d1) > tol:
            raise JetSolveFailure("c_1 != 0: the v = 0 curve is not singular",
                                  order=1)
        grid = self.carrier.x.grid(n)
        c2 = np.sqrt(self.alpha[2](grid) ** 2 + self.beta[2](grid) ** 2
                     + self.delta[2](grid) ** 2)
        if np.min(c2) < tol:
            raise JetSolveFailure("|c_2| vanishes: degenerate cusp direction",
                                  order=2)


def _frame_D(comp, kap, tau, period):
    """Componentwise d/dt of a frame field given as rows (a, b, c)."""
    a, b, c = comp
    return (grid_derivative(a, period) - kap * b,
            kap * a + grid_derivative(b, period) - tau * c,
            tau * b + grid_derivative(c, period))


def jet_reconstruct(metric, carrier, sign, order=None, n=None,
                    normalization_tol=1e-7, solve_tol=1e-9):
    """Solve for edge jets whose fundamental form matches ``metric``.

    ``sign`` = +1 (resp. -1) selects positive (resp. negative) limiting
    normal curvature sqrt(kappa^2 - kappa_s^2).  The metric must be in
    normalized form: E(t,0) = 1, F(t,0) = G(t,0) = 0, and must satisfy
    |kappa_s(t)| < kappa(t) pointwise along the carrier.
    """
    from .curves import _kappa_tau_values

    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    order = order or metric.order
    n = n or metric.grid_size
    if order > metric.order:
        raise ValueError("requested order exceeds stored metric order")
    period = metric.period
    if abs(carrier.period - period) > 1e-9 * period:
        raise ValueError("carrier period does not match the metric period")

    Ej, Fj, Gj = metric.jets_rows(n)
    scale = max(1.0, float(np.max(np.abs(Ej[0]))))
    if np.max(np.abs(Ej[0] - 1)) > normalization_tol * scale:
        raise ValueError("metric not normalized: E(t,0) != 1")
    for rows, name in ((Fj[0], "F(t,0)"), (Gj[0], "G(t,0)"), (Gj[1], "G_v(t,0)")):
        if np.max(np.abs(rows)) > normalization_tol * scale:
            raise ValueError(f"metric not normalized: {name} != 0")

    grid = carrier.x.grid(n)
    kap, tau = _kappa_tau_values(carrier, grid)
    kappa_s = singular_curvature(metric, n).sample(n)
    gap = kap ** 2 - kappa_s ** 2
    if np.min(gap) <= solve_tol * np.max(kap) ** 2:
        t_bad = grid[int(np.argmin(gap))]
        raise PointwiseAdmissibilityViolation(
            f"|kappa_s| >= kappa at t = {t_bad:.6f}")

    # order 2: alpha from F, beta from E, |c_2| from G, binormal sign given
    alpha = [np.zeros(n), np.zeros(n)]
    beta = [np.zeros(n), np.zeros(n)]
    delta = [np.zeros(n), np.zeros(n)]
    a2 = Fj[1] / 2
    b2 = (2 * grid_derivative(a2, period) - Ej[2]) / (2 * kap)
    r2 = Gj[2] / 4 - a2 ** 2 - b2 ** 2
    if np.min(r2) <= solve_tol:
        t_bad = grid[int(np.argmin(r2))]
        raise PointwiseAdmissibilityViolation(
            f"flat cusp direction (sin theta -> 0) at t = {t_bad:.6f}")
    d2 = -sign * np.sqrt(r2)
    alpha.append(a2)
    beta.append(b2)
    delta.append(d2)

    dcs = [None, None, _frame_D((a2, b2, d2), kap, tau, period)]

    for k in range(3, order + 1):
        SF = np.zeros(n)
        SE = np.zeros(n)
        SG = np.zeros(n)
        for i in range(2, k - 1):
            j = k - i
            if j >= 2:
                di = dcs[i]
                cj = (alpha[j], beta[j], delta[j])
                SF += j * (di[0] * cj[0] + di[1] * cj[1] + di[2] * cj[2])
                dj = dcs[j]
                SE += di[0] * dj[0] + di[1] * dj[1] + di[2] * dj[2]
        for i in range(3, k):
            j = k + 2 - i
            if 3 <= j <= k - 1:
                ci = (alpha[i], beta[i], delta[i])
                cj = (alpha[j], beta[j], delta[j])
                SG += i * j * (ci[0] * cj[0] + ci[1] * cj[1] + ci[2] * cj[2])

        ak = (Fj[k - 1] - SF) / k
        bk = (2 * grid_derivative(ak, period) + SE - Ej[k]) / (2 * kap)
        c2ck = (Gj[k] - SG) / (4 * k)
        denom = delta[2]
        if np.min(np.abs(denom)) < solve_tol:
            t_bad = grid[int(np.argmin(np.abs(denom)))]
            raise JetSolveFailure("delta_2 ~ 0 in the order-k solve",
                                  order=k, t=float(t_bad))
        dk = (c2ck - alpha[2] * ak - beta[2] * bk) / denom
        alpha.append(ak)
        beta.append(bk)
        delta.append(dk)
        dcs.append(_frame_D((ak, bk, dk), kap, tau, period))

    jets = JetSeries.from_rows(carrier, alpha, beta, delta, order)
    jets.check_invariants(n)
    return jets


def reconstruct_edge(metric, carrier, sign, order=None, n=None):
    """jet_reconstruct wrapped into an evaluable edge."""
    jets = jet_reconstruct(metric, carrier, sign, order=order, n=n)
    return CuspidalEdge(carrier, jets=jets)


def isomer_angle(kappa_s, kappa, spec, n=_DEFAULT_GRID):
    """Cuspidal angle of family member (i, a): cos th = kappa_s/kappa o A.

    Raises AdmissibilityViolation if |kappa_s(t)| >= kappa(sigma t + a)
    anywhere (the shifted pointwise bound).
    """
    shifted = kappa.compose_affine(spec.sigma, spec.a)
    diff = shifted - kappa_s.apply(np.abs)
    if diff.min() <= 0:
        raise AdmissibilityViolation(
            "|kappa_s(t)| >= kappa(sigma t + a) for some t")
    period = kappa_s.period
    grid = np.arange(n) * (period / n)
    ratio = kappa_s(grid) / shifted(grid)
    th = np.arctan2(spec.sigma_prime * np.sqrt(1 - ratio ** 2), ratio)
    return PeriodicScalarFn.from_samples(th, period)


def build_isomer(edge, spec, order=_DEFAULT_ORDER, n=_DEFAULT_GRID,
                 metric=None):
    """Family member f^i_{gamma(a)} of an admissible normal-form edge.

    The returned edge runs along t -> gamma(sigma_i t + a), carries the
    same metric jets as ``edge``, and has limiting normal curvature
    sigma'_i sqrt(kappa(sigma_i t + a)^2 - kappa_s(t)^2).
    """
    require_admissible(edge, n=n)
    if metric is None:
        metric = first_fundamental_form(edge, order=order, n=n)
    carrier = edge.carrier.compose_affine(spec.sigma, spec.a)
    jets = jet_reconstruct(metric, carrier, spec.sigma_prime, order=order, n=n)
    out = CuspidalEdge(carrier, jets=jets, eps=edge.eps)
    out.metric_source = metric
    # reconstruction from a normal-form metric lands in normal form:
    # tangential jets vanish and the G-jets pin half-arc-length sections
    out.is_normal_form = True
    return out


# ----------------------------------------------------------------------
# normal form


def _gamma_frame_jets(kap, tau, period, order):
    """Rows of gamma^{(m)} in the frame at t, m = 1..order."""
    n = kap.shape[-1]
    g = [(np.ones(n), np.zeros(n), np.zeros(n))]
    for _ in range(order - 1):
        g.append(_frame_D(g[-1], kap, tau, period))
    return g


def _compose_edge_series(alpha, beta, delta, H, V, gammas, kap, tau, period):
    """Jets of f(t + H(w), V(w)) - gamma(t) in the frame at t.

    ``H`` and ``V`` are series in the new cusp parameter w; the carrier
    contributes its Taylor expansion along the frame, the displacement
    its t-shifted coefficients.
    """
    order = H.order
    comps = [VJet.zero(order, H.coeffs[1].shape) for _ in range(3)]
    # carrier part: sum_m gamma^{(m)}(t) H^m / m!
    Hp = VJet.const(np.ones_like(H.coeffs[1]), order)
    fact = 1.0
    for m in range(1, order + 1):
        Hp = (Hp * H).truncate(order)
        fact *= m
        gm = gammas[m - 1]
        for c in range(3):
            comps[c] = comps[c] + Hp * (gm[c] / fact)
    # displacement part: sum_j (sum_m D^m c_j / m! H^m) V^j
    Vp = [None, None, (V * V).truncate(order)]
    for j in range(3, order + 1):
        Vp.append((Vp[-1] * V).truncate(order))
    for j in range(2, order + 1):
        cj = (alpha[j], beta[j], delta[j])
        shifted = [VJet.const(np.asarray(c, dtype=float).copy(), order)
                   for c in cj]
        Dm = cj
        Hp = VJet.const(np.ones_like(H.coeffs[1]), order)
        fact = 1.0
        for m in range(1, order - j + 1):
            Dm = _frame_D(Dm, kap, tau, period)
            Hp = (Hp * H).truncate(order)
            fact *= m
            for c in range(3):
                shifted[c] = shifted[c] + Hp * (Dm[c] / fact)
        for c in range(3):
            comps[c] = comps[c] + (shifted[c] * Vp[j]).truncate(order)
    return comps


def normal_form(edge, base_shift=0.0, order=_DEFAULT_ORDER, n=_DEFAULT_GRID,
                tol=1e-9):
    """The unique normal form of an edge germ, same base point convention.

    Finds the reparametrization (t, w) -> (t + H(t,w), V(t,w)) that kills
    the tangential displacement jets and renormalizes the sections to
    half-arc-length, order by order.  ``base_shift`` moves the base
    point: the output satisfies f(0, 0) = gamma(base_shift).
    """
    from .curves import _kappa_tau_values

    carrier = edge.carrier
    period = carrier.period
    aj, bj, dj = edge.frame_jets(order, n)
    if base_shift:
        carrier = carrier.compose_affine(1, base_shift)
        shift_rows = lambda jet: VJet(
            [PeriodicScalarFn.from_samples(r, period).compose_affine(
                1, base_shift).sample(n) for r in jet.coeffs], order)
        aj, bj, dj = shift_rows(aj), shift_rows(bj), shift_rows(dj)
    grid = carrier.x.grid(n)
    kap, tau = _kappa_tau_values(carrier, grid)
    gammas = _gamma_frame_jets(kap, tau, period, order)
    alpha, beta, delta = aj.coeffs, bj.coeffs, dj.coeffs

    r2 = beta[2] ** 2 + delta[2] ** 2
    if np.min(r2) < tol:
        raise NormalFormFailure("normal-plane cusp direction degenerates")

    # unknowns: h_k (k = 2..N) kill the tangential jets, e_k (k = 1..N-1)
    # renormalize the section; each appears linearly at its solve order,
    # so one zero-probe and one unit-probe extract the residual line
    h = [np.zeros(n)] * (order + 1)
    e = [np.zeros(n)] * (order + 1)
    e[1] = (4 * r2) ** -0.25

    def residuals(hs, es):
        H = VJet(list(hs), order)
        V = VJet([np.zeros(n)] + list(es[1:order]) + [np.zeros(n)], order)
        Fe, Fn, Fb = _compose_edge_series(alpha, beta, delta, H, V, gammas,
                                          kap, tau, period)
        Pn, Pb = Fn.d_dv(), Fb.d_dv()
        norm2 = (Pn * Pn + Pb * Pb).truncate(order)
        return Fe, norm2, (Fn, Fb)

    def solve_linear(probe, k, label):
        r0 = probe(np.zeros(n))[k]
        r1 = probe(np.ones(n))[k]
        coeff = r1 - r0
        if np.min(np.abs(coeff)) < 1e-12:
            raise NormalFormFailure(f"singular {label} solve at order {k}")
        return -r0 / coeff

    def tangential_probe(k):
        def probe(val):
            hs = list(h)
            hs[k] = val
            return residuals(hs, e)[0]
        return probe

    def norm_probe(k):
        def probe(val):
            es = list(e)
            es[k - 1] = val
            return residuals(h, es)[1]
        return probe

    h[2] = solve_linear(tangential_probe(2), 2, "tangential")
    for k in range(3, order + 1):
        e[k - 1] = solve_linear(norm_probe(k), k, "normalization")
        h[k] = solve_linear(tangential_probe(k), k, "tangential")

    Fe, norm2, (Fn, Fb) = residuals(h, e)
    dev_t = max(np.max(np.abs(Fe[k])) for k in range(2, order + 1))
    dev_n = max(np.max(np.abs(norm2[k] - (1.0 if k == 2 else 0.0)) / 1.0)
                for k in range(2, order + 1))
    if max(dev_t, dev_n) > 1e-6:
        raise NormalFormFailure(
            f"normalization residuals too large: {dev_t:.2e}, {dev_n:.2e}")

    zero = [np.zeros(n)] * (order + 1)
    jets = JetSeries.from_rows(carrier, zero, Fn.coeffs, Fb.coeffs, order)
    out = CuspidalEdge(carrier, jets=jets, eps=edge.eps)
    out.is_normal_form = True
    return out


def uniqueness_check(edge, metric, carrier, order=_DEFAULT_ORDER,
                     n=_DEFAULT_GRID, tol=1e-6):
    """Classify an edge against the two reconstructions from its metric.

    Returns a dict with ``verdict`` in {"plus", "minus", "neither"}; for
    "neither" also the first mismatching jet order.  Comparison happens
    on normal-form jets, up to the v-orientation freedom of normal forms
    (c_k -> (-1)^k c_k).
    """
    nf = normal_form(edge, order=order, n=n)
    a, b, d = nf.frame_jets(order, n)
    best = {"verdict": "neither", "first_mismatch_order": 2,
            "residual": np.inf}
    for sign, name in ((1, "plus"), (-1, "minus")):
        jets = jet_reconstruct(metric, carrier, sign, order=order, n=n)
        ar, br, dr = jets.frame_jets(order, n)
        for flip in (1, -1):
            res = 0.0
            first_bad = None
            for k in range(2, order + 1):
                fk = flip ** k
                scale = max(1.0, float(np.max(np.abs(br[k]))),
                            float(np.max(np.abs(dr[k]))))
                dev = max(np.max(np.abs(a[k] * fk - ar[k])),
                          np.max(np.abs(b[k] * fk - br[k])),
                          np.max(np.abs(d[k] * fk - dr[k]))) / scale
                res = max(res, dev)
                if dev > tol and first_bad is None:
                    first_bad = k
            if first_bad is None:
                return {"verdict": name, "residual": float(res),
                        "v_flipped": flip == -1}
            if res < best["residual"]:
                best = {"verdict": "neither", "first_mismatch_order": first_bad,
                        "residual": float(res)}
    return best

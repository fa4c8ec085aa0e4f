"""Independent numerical routes used to pin expected values in tests.

These deliberately avoid the library's jet pipeline: derivatives come
from Richardson-extrapolated central differences of the quadrature-based
edge map, and v-jets from a least-squares polynomial fit on a stencil.
Accuracy is around 1e-7 on the coefficients, good enough to catch any
structural error in the series arithmetic.
"""

import numpy as np


def _richardson_diff(fn, x, h):
    d1 = (fn(x + h) - fn(x - h)) / (2 * h)
    d2 = (fn(x + h / 2) - fn(x - h / 2)) / h
    return (4 * d2 - d1) / 3


def metric_jets_fd(edge, t0, order=4, dv=0.16, dt=1e-4):
    """E, F, G v-jet coefficients at parameter t0, to the given order."""
    deg = order + 4
    vs = dv * np.cos(np.pi * np.arange(2 * deg + 1) / (2 * deg))  # Chebyshev

    ft = _richardson_diff(lambda s: edge.evaluate(s, vs), t0, dt)
    fv = _richardson_diff(lambda w: edge.evaluate(t0, w), vs, dt)
    E = np.einsum("ij,ij->i", ft, ft)
    F = np.einsum("ij,ij->i", ft, fv)
    G = np.einsum("ij,ij->i", fv, fv)

    V = np.vander(vs / dv, deg + 1, increasing=True)
    scale = dv ** np.arange(deg + 1)
    fit = lambda y: (np.linalg.lstsq(V, y, rcond=None)[0] / scale)[:order + 1]
    return fit(E), fit(F), fit(G)


def frame_jets_fd(edge, t0, order=4, dv=0.16):
    """Displacement jets (alpha, beta, delta) at t0 by stencil fitting."""
    deg = order + 4
    vs = dv * np.cos(np.pi * np.arange(2 * deg + 1) / (2 * deg))
    frame, _, _ = edge.carrier.frenet(np.array([t0]))
    disp = edge.evaluate(t0, vs) - edge.carrier.position(np.array([t0]))
    comps = [disp @ frame.e[0], disp @ frame.n[0], disp @ frame.b[0]]
    V = np.vander(vs / dv, deg + 1, increasing=True)
    scale = dv ** np.arange(deg + 1)
    fit = lambda y: (np.linalg.lstsq(V, y, rcond=None)[0] / scale)[:order + 1]
    return [fit(c) for c in comps]


def grid_symmetry_residual(values, kind, offset_index):
    """Sup-residual of a shift/reflection hypothesis on a sampled profile."""
    n = values.size
    if kind == "shift":
        return float(np.max(np.abs(np.roll(values, -offset_index) - values)))
    rolled = np.roll(values[::-1], offset_index + 1)
    return float(np.max(np.abs(rolled - values)))

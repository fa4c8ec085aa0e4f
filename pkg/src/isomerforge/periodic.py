"""Periodic scalar functions represented by truncated Fourier series.

Every scalar quantity that lives on the parameter circle (curvature,
torsion, cuspidal angle, jet coefficients, ...) is an instance of
:class:`PeriodicScalarFn`.  The canonical representation is a trimmed
half-spectrum (``numpy.fft.rfft`` convention, scaled by ``1/n``), which
makes derivatives exact term-wise operations and keeps products alias
free by resampling on a sufficiently fine grid.

Functions of functions (square roots, inverse trigonometry, quotients)
are handled by :meth:`PeriodicScalarFn.apply`: sample, transform, refit,
doubling the grid until the spectral tail is below tolerance.  For the
real-analytic inputs this library deals with, coefficients decay
geometrically and a few hundred modes resolve everything to near machine
precision.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import SpectralResolutionError

_TRIM_REL = 1e-15
_DEFAULT_TOL = 1e-12
_MAX_GRID = 1 << 15


def _next_pow2(n):
    p = 1
    while p < n:
        p <<= 1
    return p


class PeriodicScalarFn:
    """A real function on R/(period Z) with analytic derivatives.

    Parameters
    ----------
    coeffs : array-like of complex
        Half spectrum ``c[k]``, ``k = 0..K``, in the scaled rfft
        convention: ``f(t) = c[0].re + sum_k 2 Re(c[k] exp(i k w t))``
        with ``w = 2 pi / period``.
    period : float
        Fundamental period, > 0.
    """

    __slots__ = ("coeffs", "period")

    def __init__(self, coeffs, period):
        if period <= 0:
            raise ValueError("period must be positive")
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d array")
        self.coeffs = _trim(c)
        self.period = float(period)

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def constant(cls, value, period):
        return cls(np.array([complex(value)]), period)

    @classmethod
    def from_samples(cls, values, period):
        """Fit the trigonometric interpolant of uniform samples.

        ``values[j]`` is the function at ``t_j = j * period / n``.
        """
        v = np.asarray(values, dtype=float)
        n = v.size
        c = np.fft.rfft(v) / n
        return cls(c, period)

    @classmethod
    def from_callable(cls, fn, period, n=64, tol=_DEFAULT_TOL, max_n=_MAX_GRID):
        """Sample ``fn`` adaptively until the spectral tail is below ``tol``.

        The tail criterion compares the top quarter of the spectrum
        against the overall coefficient scale, so analytic inputs
        converge after a few doublings.
        """
        n = _next_pow2(max(8, n))
        while True:
            t = np.arange(n) * (period / n)
            v = np.asarray(fn(t), dtype=float)
            c = np.fft.rfft(v) / n
            scale = np.abs(c).max() + 1e-300
            tail = np.abs(c[(3 * c.size) // 4:]).max()
            if tail <= tol * max(scale, 1.0):
                return cls(c, period)
            if n >= max_n:
                raise SpectralResolutionError(
                    f"function not resolved at n={n}: tail {tail:.3e} > {tol:.1e}")
            n *= 2

    @classmethod
    def from_fourier_terms(cls, terms, period):
        """Build from ``[[k, a_k, b_k], ...]``: sum of a cos + b sin terms."""
        kmax = 0
        for k, _, _ in terms:
            kmax = max(kmax, int(k))
        c = np.zeros(kmax + 1, dtype=complex)
        for k, a, b in terms:
            k = int(k)
            if k < 0:
                raise ValueError("harmonic index must be >= 0")
            if k == 0:
                c[0] += a
            else:
                # a cos + b sin = 2 Re((a - i b)/2 * e^{ikwt})
                c[k] += (a - 1j * b) / 2.0
        return cls(c, period)

    def to_fourier_terms(self, tol=1e-14):
        """Inverse of :meth:`from_fourier_terms`; drops negligible terms."""
        scale = np.abs(self.coeffs).max() + 1e-300
        out = []
        for k, ck in enumerate(self.coeffs):
            if k == 0:
                out.append([0, float(ck.real), 0.0])
            elif abs(ck) > tol * max(scale, 1.0):
                out.append([k, float(2 * ck.real), float(-2 * ck.imag)])
        return out

    # ------------------------------------------------------------------
    # evaluation

    @property
    def nmodes(self):
        return self.coeffs.size

    def grid(self, n):
        """Uniform parameter grid of size n over one period."""
        return np.arange(n) * (self.period / n)

    def sample(self, n):
        """Values on the uniform grid of size ``n`` (spectral, exact)."""
        n = int(n)
        K = self.coeffs.size
        if n >= 2 * K - 1:
            c = np.zeros(n // 2 + 1, dtype=complex)
            c[:K] = self.coeffs
            return np.fft.irfft(c * n, n)
        return self(self.grid(n))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        w = 2 * np.pi / self.period
        k = np.arange(self.coeffs.size)
        phase = np.exp(1j * np.multiply.outer(t, k) * w)
        vals = phase @ (2.0 * self.coeffs)
        vals = vals.real - self.coeffs[0].real
        return vals if t.ndim else float(vals)

    def derivative(self, order=1):
        w = 2 * np.pi / self.period
        k = np.arange(self.coeffs.size)
        c = self.coeffs * (1j * k * w) ** order
        if c.size > 1:
            c = c.copy()
        return PeriodicScalarFn(c, self.period)

    def antiderivative_mean_zero(self):
        """Periodic antiderivative of the mean-zero part (k = 0 dropped)."""
        w = 2 * np.pi / self.period
        c = self.coeffs.copy()
        c[0] = 0
        k = np.arange(1, c.size)
        c[1:] = c[1:] / (1j * k * w)
        return PeriodicScalarFn(c, self.period)

    @property
    def mean(self):
        return float(self.coeffs[0].real)

    def compose_affine(self, sigma, shift):
        """Return ``t -> f(sigma t + shift)`` for ``sigma`` in {+1, -1}."""
        if sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        w = 2 * np.pi / self.period
        k = np.arange(self.coeffs.size)
        c = self.coeffs * np.exp(1j * k * w * shift)
        if sigma == -1:
            c = np.conj(c)
        return PeriodicScalarFn(c, self.period)

    # ------------------------------------------------------------------
    # algebra

    def _binary_grid(self, other):
        n = _next_pow2(2 * (self.nmodes + other.nmodes))
        return max(n, 16)

    def __add__(self, other):
        if np.isscalar(other):
            c = self.coeffs.copy()
            c[0] += other
            return PeriodicScalarFn(c, self.period)
        _check_period(self, other)
        K = max(self.nmodes, other.nmodes)
        c = np.zeros(K, dtype=complex)
        c[:self.nmodes] += self.coeffs
        c[:other.nmodes] += other.coeffs
        return PeriodicScalarFn(c, self.period)

    __radd__ = __add__

    def __neg__(self):
        return PeriodicScalarFn(-self.coeffs, self.period)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return PeriodicScalarFn(self.coeffs * other, self.period)
        _check_period(self, other)
        n = self._binary_grid(other)
        v = self.sample(n) * other.sample(n)
        return PeriodicScalarFn.from_samples(v, self.period)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return PeriodicScalarFn(self.coeffs / other, self.period)
        _check_period(self, other)
        return apply_pointwise(lambda a, b: a / b, self, other)

    def __rtruediv__(self, other):
        return apply_pointwise(lambda a: other / a, self)

    def apply(self, fn, tol=_DEFAULT_TOL):
        """Pointwise transform refit as a periodic function."""
        return apply_pointwise(fn, self, tol=tol)

    # ------------------------------------------------------------------
    # extrema and norms

    def _refined_extremum(self, sign, n, xtol=1e-10):
        # sign = +1 searches the minimum of f, -1 the minimum of -f
        n = max(n, 4 * self.nmodes)
        t = self.grid(n)
        v = sign * self(t)
        idx = int(np.argmin(v))
        h = self.period / n
        res = minimize_scalar(lambda s: sign * self(s),
                              bounds=(t[idx] - h, t[idx] + h),
                              method="bounded", options={"xatol": xtol})
        return min(v[idx], res.fun), float(res.x)

    def min(self, n=512):
        return self._refined_extremum(1.0, n)[0]

    def max(self, n=512):
        return -self._refined_extremum(-1.0, n)[0]

    def sup_norm(self, n=512):
        return max(abs(self.min(n)), abs(self.max(n)))

    def __repr__(self):
        return (f"PeriodicScalarFn(period={self.period:.6g}, "
                f"modes={self.nmodes}, mean={self.mean:.6g})")


def _trim(c):
    scale = np.abs(c).max()
    keep = np.nonzero(np.abs(c) > _TRIM_REL * max(scale, 1.0))[0]
    if scale == 0 or keep.size == 0:
        return c[:1]
    return np.ascontiguousarray(c[:keep[-1] + 1])


def _check_period(a, b, rtol=1e-12):
    if abs(a.period - b.period) > rtol * max(a.period, b.period):
        raise ValueError(f"period mismatch: {a.period} vs {b.period}")


def apply_pointwise(fn, *fns, tol=_DEFAULT_TOL, n=None, max_n=_MAX_GRID):
    """Apply ``fn`` to sampled values of one or more periodic functions.

    Doubles the grid until the result's spectral tail is below ``tol``.
    """
    period = fns[0].period
    for f in fns[1:]:
        _check_period(fns[0], f)
    if n is None:
        n = _next_pow2(2 * max(f.nmodes for f in fns))
    n = max(n, 32)
    while True:
        vals = fn(*[f.sample(n) for f in fns])
        c = np.fft.rfft(np.asarray(vals, dtype=float)) / n
        scale = np.abs(c).max() + 1e-300
        tail = np.abs(c[(3 * c.size) // 4:]).max()
        if tail <= tol * max(scale, 1.0):
            return PeriodicScalarFn(c, period)
        if n >= max_n:
            raise SpectralResolutionError(
                f"pointwise transform not resolved at n={n}")
        n *= 2


def grid_derivative(rows, period, order=1):
    """Spectral d/dt along the last axis of uniformly sampled rows."""
    rows = np.asarray(rows, dtype=float)
    n = rows.shape[-1]
    w = 2 * np.pi / period
    k = np.arange(n // 2 + 1)
    mult = (1j * k * w) ** order
    if n % 2 == 0:
        mult = mult.copy()
        mult[-1] = 0.0  # Nyquist bin carries no odd-derivative information
    return np.fft.irfft(np.fft.rfft(rows, axis=-1) * mult, n, axis=-1)

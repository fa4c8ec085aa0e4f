"""Truncated Taylor series in the transverse parameter v.

A :class:`VJet` stores coefficients ``c[k]`` of ``v**k`` up to a fixed
truncation order.  Coefficients are numpy arrays sampled on a shared
uniform parameter grid (or scalars for t-independent series), so all
arithmetic is vectorized over the grid.  This is the workhorse for
first-fundamental-form jets, for the order-by-order reconstruction of
edges from a metric, and for normal-form conversion.

Only operations needed downstream are provided: ring arithmetic,
composition with a series vanishing at 0, the analytic primitives
cos/sin/sqrt, integration in v, and spectral differentiation in t.
"""

from __future__ import annotations

import math

import numpy as np

from .periodic import grid_derivative


class VJet:
    """Polynomial ``sum_k c[k] v^k`` truncated above ``order``."""

    __slots__ = ("coeffs", "order")

    # defer mixed ndarray ops to our __rmul__/__radd__ instead of letting
    # numpy broadcast over the VJet object
    __array_ufunc__ = None

    def __init__(self, coeffs, order):
        self.order = int(order)
        self.coeffs = [np.asarray(c, dtype=float) for c in coeffs[:order + 1]]
        while len(self.coeffs) < order + 1:
            self.coeffs.append(np.zeros_like(self.coeffs[0]) if self.coeffs
                               else np.array(0.0))

    @classmethod
    def zero(cls, order, shape=()):
        z = np.zeros(shape)
        return cls([z.copy() for _ in range(order + 1)], order)

    @classmethod
    def const(cls, value, order):
        c = [np.asarray(value, dtype=float)]
        return cls(c + [np.zeros_like(c[0]) for _ in range(order)], order)

    @classmethod
    def var(cls, order, shape=()):
        """The series ``v`` itself."""
        j = cls.zero(order, shape)
        j.coeffs[1] = np.ones(shape) if shape else np.array(1.0)
        return j

    def __getitem__(self, k):
        return self.coeffs[k]

    def truncate(self, order):
        return VJet(self.coeffs[:order + 1], min(order, self.order))

    # ------------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, VJet):
            c = [x.copy() for x in self.coeffs]
            c[0] = c[0] + other
            return VJet(c, self.order)
        n = min(self.order, other.order)
        return VJet([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return VJet([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, VJet) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, VJet):
            return VJet([c * other for c in self.coeffs], self.order)
        n = min(self.order, other.order)
        out = []
        for k in range(n + 1):
            acc = self.coeffs[0] * other.coeffs[k]
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * other.coeffs[k - i]
            out.append(acc)
        return VJet(out, n)

    __rmul__ = __mul__

    def shift_up(self, m=1):
        """Multiply by ``v**m`` (drops the top ``m`` coefficients)."""
        zeros = [np.zeros_like(self.coeffs[0]) for _ in range(m)]
        return VJet(zeros + self.coeffs[:self.order + 1 - m], self.order)

    def integrate_v(self):
        """Term-wise ``int_0^v``; constant of integration 0."""
        out = [np.zeros_like(self.coeffs[0])]
        for k in range(min(self.order, len(self.coeffs))):
            out.append(self.coeffs[k] / (k + 1))
        return VJet(out, self.order)

    def d_dv(self):
        out = [(k + 1) * self.coeffs[k + 1] for k in range(self.order)]
        out.append(np.zeros_like(self.coeffs[0]))
        return VJet(out, self.order)

    def d_dt(self, period):
        """Spectral derivative of every coefficient row."""
        return VJet([grid_derivative(c, period) if c.ndim else np.zeros_like(c)
                     for c in self.coeffs], self.order)

    def compose(self, inner):
        """Substitute ``v = inner(w)`` where ``inner[0] = 0``."""
        if np.max(np.abs(inner.coeffs[0])) > 0:
            raise ValueError("inner series must vanish at 0")
        n = min(self.order, inner.order)
        result = VJet.const(self.coeffs[0], n)
        power = VJet.const(np.ones_like(inner.coeffs[0]), n)
        for k in range(1, n + 1):
            power = power * inner
            result = result + power * self.coeffs[k]
        return result

    def eval(self, v):
        """Horner evaluation; broadcasts coefficient rows against ``v``."""
        acc = np.zeros(np.broadcast(self.coeffs[0], v).shape)
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    # ------------------------------------------------------------------
    # analytic primitives

    def cos_sin(self):
        """cos and sin of the series in one pass."""
        a0 = self.coeffs[0]
        rest = VJet([np.zeros_like(a0)] + self.coeffs[1:], self.order)
        c, s = _cos_sin_nilpotent(rest)
        cos0, sin0 = np.cos(a0), np.sin(a0)
        return (c * cos0 - s * sin0, s * cos0 + c * sin0)

    def sqrt(self):
        """Series square root; leading coefficient must be positive."""
        a0 = self.coeffs[0]
        if np.min(a0) <= 0:
            raise ValueError("sqrt of a series with non-positive lead")
        s0 = np.sqrt(a0)
        out = [s0]
        for k in range(1, self.order + 1):
            acc = self.coeffs[k].astype(float).copy()
            for i in range(1, k):
                acc = acc - out[i] * out[k - i]
            out.append(acc / (2 * s0))
        return VJet(out, self.order)


def _cos_sin_nilpotent(x):
    """cos/sin of a series with zero constant term, by Taylor sums."""
    n = x.order
    one = np.ones_like(x.coeffs[0])
    cos = VJet.const(one, n)
    sin = VJet.zero(n, x.coeffs[0].shape)
    power = VJet.const(one, n)
    for m in range(1, n + 1):
        power = power * x
        coef = 1.0 / math.factorial(m)
        if m % 4 == 0:
            cos = cos + power * coef
        elif m % 4 == 1:
            sin = sin + power * coef
        elif m % 4 == 2:
            cos = cos - power * coef
        else:
            sin = sin - power * coef
    return cos, sin


def dot3(a, b):
    """Dot product of two triples of VJets (Frenet components)."""
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]

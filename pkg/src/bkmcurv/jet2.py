"""Bivariate truncated Taylor arithmetic of total order 3.

A :class:`Jet2` holds the Taylor coefficients ``c[a, b] = d^(a+b) f / dθ^a dx^b / (a! b!)``
of a scalar function of two variables at one expansion point, for ``a + b <= 3``.
The two variables are called ``theta`` and ``x`` throughout, but nothing here
depends on what they mean; the geometry layer also uses rotated frames.

Coefficients live in an array of shape ``(10, *batch)`` so that one jet can carry
many expansion points at once (the quadrature layer evaluates all nodes of a
panel in a single call).  Scalar jets have ``batch == ()``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

#: Storage order of the ten coefficients.
INDEX = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3))
POSITION = {ab: i for i, ab in enumerate(INDEX)}
ORDER = np.array([a + b for a, b in INDEX])

# For each output slot k, the (i, j) slot pairs whose product lands in k.
_PRODUCT = tuple(
    tuple(
        (POSITION[(p, q)], POSITION[(a - p, b - q)])
        for p in range(a + 1)
        for q in range(b + 1)
    )
    for a, b in INDEX
)

SQRT_FLOOR = 1e-12


def _pad(c, ndim):
    # batch axes are trailing; scalar jets get singleton batch axes appended
    return c.reshape(c.shape + (1,) * (ndim - c.ndim)) if c.ndim < ndim else c


class Jet2:
    __slots__ = ("c",)

    def __init__(self, c):
        c = np.asarray(c, dtype=float)
        if c.shape[:1] != (10,):
            raise ValueError(f"expected leading axis of length 10, got shape {c.shape}")
        self.c = c

    # -- construction -----------------------------------------------------
    @classmethod
    def zeros(cls, batch=()):
        return cls(np.zeros((10,) + tuple(batch)))

    @classmethod
    def from_dict(cls, coeffs, batch=()):
        """Build a jet from ``{(a, b): value}``; missing entries are zero."""
        jet = cls.zeros(batch)
        for ab, v in coeffs.items():
            jet.c[POSITION[ab]] = v
        return jet

    # -- access -----------------------------------------------------------
    def __getitem__(self, ab):
        return self.c[POSITION[ab]]

    @property
    def value(self):
        return self.c[0]

    @property
    def batch(self):
        return self.c.shape[1:]

    def derivative(self, a, b):
        """Raw partial derivative ``d^(a+b) f / dθ^a dx^b`` (factorials restored)."""
        return self[(a, b)] * (math.factorial(a) * math.factorial(b))

    def as_dict(self):
        return {ab: self.c[i] for i, ab in enumerate(INDEX)}

    def __repr__(self):
        if self.batch:
            return f"Jet2(batch={self.batch})"
        body = ", ".join(f"c{a}{b}={self.c[i]:.6g}" for i, (a, b) in enumerate(INDEX))
        return f"Jet2({body})"

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet2):
            return other.c
        s = np.asarray(other, dtype=float)
        out = np.zeros((10,) + s.shape)
        out[0] = s
        return out

    def __add__(self, other):
        o = self._coerce(other)
        n = max(self.c.ndim, o.ndim)
        return Jet2(_pad(self.c, n) + _pad(o, n))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        n = max(self.c.ndim, o.ndim)
        return Jet2(_pad(self.c, n) - _pad(o, n))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet2(-self.c)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, s):
        if isinstance(s, Jet2):
            return mul(self, recip(s))
        return scale(self, 1.0 / np.asarray(s, dtype=float))


def const(v, batch=()):
    """Jet of a constant function."""
    v = np.broadcast_to(np.asarray(v, dtype=float), batch or np.shape(v))
    out = np.zeros((10,) + v.shape)
    out[0] = v
    return Jet2(out)


def var(v, which):
    """Seed jet of the coordinate ``which`` ("theta" or "x") at value ``v``."""
    if which not in ("theta", "x"):
        raise ValueError(f"unknown axis {which!r}")
    v = np.asarray(v, dtype=float)
    out = np.zeros((10,) + v.shape)
    out[0] = v
    out[POSITION[(1, 0) if which == "theta" else (0, 1)]] = 1.0
    return Jet2(out)


def linear(value, d_theta, d_x):
    """Jet of an affine function with the given value and gradient."""
    value = np.asarray(value, dtype=float)
    out = np.zeros((10,) + value.shape)
    out[0] = value
    out[1] = d_theta
    out[2] = d_x
    return Jet2(out)


def add(u, v):
    return u + v


def sub(u, v):
    return u - v


def scale(u, s):
    s = np.asarray(s, dtype=float)
    n = max(u.c.ndim, s.ndim + 1)
    return Jet2(_pad(u.c, n) * s)


def mul(u, v):
    """Truncated Cauchy product."""
    n = max(u.c.ndim, v.c.ndim)
    a, b = _pad(u.c, n), _pad(v.c, n)
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.empty((10,) + shape)
    for k, terms in enumerate(_PRODUCT):
        acc = a[terms[0][0]] * b[terms[0][1]]
        for i, j in terms[1:]:
            acc = acc + a[i] * b[j]
        out[k] = acc
    return Jet2(out)


def compose(f0, f1, f2, f3, u):
    """Jet of ``g(u)`` given ``g`` and its first three derivatives at ``u.value``."""
    d = Jet2(u.c.copy())
    d.c[0] = 0.0
    d2 = mul(d, d)
    d3 = mul(d2, d)
    f0, f1, f2, f3 = (np.asarray(f, dtype=float) for f in (f0, f1, f2, f3))
    out = d.c * f1 + d2.c * (f2 / 2.0) + d3.c * (f3 / 6.0)
    out[0] = f0
    return Jet2(out)


def exp(u):
    e = np.exp(u.value)
    return compose(e, e, e, e, u)


def ln(u):
    v = u.value
    if np.any(~(v > 0)):
        bad = np.min(v)
        raise DomainError(f"ln requires a positive argument, got {bad!r}", bad)
    inv = 1.0 / v
    return compose(np.log(v), inv, -inv * inv, 2.0 * inv**3, u)


def recip(u):
    v = u.value
    if np.any(v == 0):
        raise DomainError("reciprocal of a jet with zero value", 0.0)
    inv = 1.0 / v
    return compose(inv, -inv**2, 2.0 * inv**3, -6.0 * inv**4, u)


def cosh(u):
    ch, sh = np.cosh(u.value), np.sinh(u.value)
    return compose(ch, sh, ch, sh, u)


def sinh(u):
    ch, sh = np.cosh(u.value), np.sinh(u.value)
    return compose(sh, ch, sh, ch, u)


def sqrt(u):
    v = u.value
    if np.any(~(v > SQRT_FLOOR)):
        bad = np.min(v)
        raise DomainError(f"sqrt requires an argument above {SQRT_FLOOR}, got {bad!r}", bad)
    s = np.sqrt(v)
    return compose(s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v), u)


def ln2cosh(u):
    """Jet of ``ln(2 cosh u)``, evaluated without overflow or cancellation."""
    a = u.value
    e = np.exp(-2.0 * np.abs(a))
    t = np.tanh(a)
    sech2 = 4.0 * e / (1.0 + e) ** 2
    return compose(np.abs(a) + np.log1p(e), t, sech2, -2.0 * t * sech2, u)


# Taylor coefficients in u of the m-th derivative of cosh(sqrt(u)):
# C^(m)(u) = sum_n u^n (n+m)! / (n! (2n+2m)!)
_CS_TERMS = 26
_CS_SERIES = [
    np.array(
        [math.factorial(n + m) / (math.factorial(n) * math.factorial(2 * n + 2 * m)) for n in range(_CS_TERMS)]
    )
    for m in range(4)
]
_CS_SWITCH = 4.0


def cosh_sqrt_derivatives(u):
    """``cosh(sqrt(u))`` and its first three u-derivatives; entire in ``u``."""
    u = np.asarray(u, dtype=float)
    series = [np.polynomial.polynomial.polyval(u, coef) for coef in _CS_SERIES]
    if np.all(np.abs(u) <= _CS_SWITCH):
        return series
    with np.errstate(all="ignore"):
        r = np.sqrt(np.abs(u))
        ch, sh = np.cosh(r), np.sinh(r)
        pos = [ch, sh / (2 * r), (r * ch - sh) / (4 * r**3), (r * r * sh - 3 * r * ch + 3 * sh) / (8 * r**5)]
        co, si = np.cos(r), np.sin(r)
        neg = [co, si / (2 * r), (si - r * co) / (4 * r**3), (3 * si - r * r * si - 3 * r * co) / (8 * r**5)]
    small = np.abs(u) <= _CS_SWITCH
    return [np.where(small, s, np.where(u > 0, p, n)) for s, p, n in zip(series, pos, neg)]


def cosh_sqrt(u):
    """Jet of ``cosh(sqrt(u))``; defined for every real ``u`` (no branch point)."""
    return compose(*cosh_sqrt_derivatives(u.value), u)

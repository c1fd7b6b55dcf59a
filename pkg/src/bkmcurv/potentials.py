"""Log-partition potentials of transverse-field Ising chains as order-3 jets.

Every model can be evaluated in two ways:

``model.jet(at, frame)``
    The potential written with elementary jet primitives and seeded in an
    arbitrary affine frame (the natural ``(theta, x)`` frame by default).
    ``cosh(sqrt(q))`` is used as a single entire function of ``q`` so the
    formulas are regular at the origin and where the dispersion vanishes.

``model.ray_jet(at)``
    The same potential expanded in the orthonormal frame aligned with the ray
    through ``at``.  Each potential is a log-sum-exp of positively 1-homogeneous
    exponents; in the ray frame their second and third radial derivatives are
    exactly zero, so the exponentially small parts of the metric survive at low
    temperature instead of drowning in rounding error.  Scalar curvature is
    invariant under this rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import jet2
from .errors import ConfigError, DomainError
from .jet2 import Jet2
from .quadrature import QuadratureSpec, integrate_jet_panels
from .spinchain import FdSpec, SpinChainSpec, fd_jet_with_error, psi_exact, psi_fd_jet

NEAR_SINGULAR_FRACTION = 0.05


class NaturalPoint(NamedTuple):
    p1: float
    p2: float


class Frame:
    """Affine frame ``p = origin + basis @ (u, v)``; columns of ``basis`` are the frame axes."""

    def __init__(self, origin, basis):
        self.origin = np.asarray(origin, dtype=float)
        self.basis = np.asarray(basis, dtype=float)

    @classmethod
    def natural(cls, at):
        return cls(at, np.eye(2))

    @classmethod
    def ray(cls, at):
        p1, p2 = float(at[0]), float(at[1])
        rho = np.hypot(p1, p2)
        if rho == 0:
            raise DomainError("the ray frame is undefined at the origin", 0.0)
        e1 = np.array([p1, p2]) / rho
        return cls(at, np.column_stack([e1, [-e1[1], e1[0]]]))

    @property
    def rho(self):
        return float(np.hypot(*self.origin))

    def is_natural(self):
        return np.array_equal(self.basis, np.eye(2))

    def seeds(self):
        """Jets of the natural coordinates as functions of the frame coordinates."""
        b = self.basis
        return (jet2.linear(self.origin[0], b[0, 0], b[0, 1]),
                jet2.linear(self.origin[1], b[1, 0], b[1, 1]))


# ---------------------------------------------------------------------------
# ray-frame building blocks
# ---------------------------------------------------------------------------

def homogeneous_jet(g0, g1, g2, g3, rho):
    """Ray-frame jet of a 1-homogeneous function with transverse Taylor coefficients ``g``.

    With ``f(rho + u, v) = s * g(v / s)``, ``s = 1 + u / rho``, the pure radial
    coefficients of order >= 2 vanish identically and are stored as exact zeros.
    """
    g0 = np.asarray(g0, dtype=float)
    c = np.zeros((10,) + g0.shape)
    c[0] = g0
    c[1] = g0 / rho
    c[2] = g1
    c[5] = g2
    c[8] = -g2 / rho
    c[9] = g3
    return Jet2(c)


def sqrt_form_jet(a, b, d, rho):
    """Ray-frame jet of ``sqrt(p^T M p)`` from ``a = p0^T M p0``, ``b = e2^T M p0``, ``d = rho^2 det M``."""
    a = np.asarray(a, dtype=float)
    if np.any(~(a > 0)):
        bad = np.min(a)
        raise DomainError(f"quadratic form must be positive at the expansion point, got {bad!r}", bad)
    s = np.sqrt(a)
    g2 = d / (2.0 * a * s)
    return homogeneous_jet(s, b / s, g2, -b * g2 / a, rho)


def quadratic_form_jet(m, frame):
    """Ray-frame jet of ``sqrt(p^T M p)`` for a constant positive-definite ``M``."""
    (ma, mb), (_, mc) = m
    t, x = frame.origin
    rho = frame.rho
    a = ma * t * t + 2 * mb * t * x + mc * x * x
    b = (mb * (t - x) * (t + x) + (mc - ma) * t * x) / rho
    return sqrt_form_jet(a, b, rho * rho * (ma * mc - mb * mb), rho)


def linear_jet(w, frame):
    e = frame.basis
    return jet2.linear(w[0] * frame.origin[0] + w[1] * frame.origin[1],
                       w[0] * e[0, 0] + w[1] * e[1, 0], w[0] * e[0, 1] + w[1] * e[1, 1])


def log_sum_exp(terms):
    """Jet of ``ln sum_i w_i exp(h_i)`` for ``terms = [(w_i, h_i), ...]`` with ``w_i > 0``.

    The largest exponent is factored out, so the dominant term contributes an
    exactly-zero jet to the remaining sum.
    """
    weights = np.array([w for w, _ in terms], dtype=float)
    stack = np.stack([np.broadcast_to(h.c, terms[0][1].c.shape) for _, h in terms], axis=1)
    lead = np.argmax(stack[0], axis=0)
    top = Jet2(np.take_along_axis(stack, lead[None, None], axis=1)[:, 0])
    # all terms at once: the term axis sits right after the coefficient axis
    e = jet2.exp(Jet2(stack - top.c[:, None]))
    w = weights.reshape((1, -1) + (1,) * (stack.ndim - 2))
    acc = Jet2((e.c * w).sum(axis=1))
    return top + jet2.ln(acc)


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

class PotentialModel:
    """Base class; subclasses implement :meth:`jet` and (optionally) :meth:`ray_jet`."""

    name = "model"
    supports_ray = True
    n_sites = None

    def jet(self, at, frame=None):
        raise NotImplementedError

    def ray_jet(self, at):
        raise NotImplementedError

    def value(self, at):
        return float(self.jet(at).value)

    def _seeds(self, at, frame):
        frame = Frame.natural(at) if frame is None else frame
        if not np.array_equal(frame.origin, np.asarray(at, dtype=float)):
            raise ConfigError("frame origin must coincide with the evaluation point")
        return frame.seeds()


@dataclass(frozen=True)
class ClosedForm1(PotentialModel):
    """Single qubit in longitudinal and transverse fields: ``ln(2 cosh sqrt(z^2 + x^2))``."""

    name = "closed1"
    n_sites = 1

    def jet(self, at, frame=None):
        z, x = self._seeds(at, frame)
        return jet2.ln(2.0 * jet2.cosh_sqrt(z * z + x * x))

    def ray_jet(self, at):
        frame = Frame.ray(at)
        return jet2.ln2cosh(quadratic_form_jet(((1.0, 0.0), (0.0, 1.0)), frame))


@dataclass(frozen=True)
class ClosedForm2(PotentialModel):
    """Open two-site chain: ``ln(2 cosh theta + 2 cosh sqrt(theta^2 + 4 x^2))``."""

    name = "closed2"
    n_sites = 2

    def jet(self, at, frame=None):
        t, x = self._seeds(at, frame)
        return jet2.ln(2.0 * jet2.cosh(t) + 2.0 * jet2.cosh_sqrt(t * t + 4.0 * (x * x)))

    def ray_jet(self, at):
        frame = Frame.ray(at)
        t = linear_jet((1.0, 0.0), frame)
        r = quadratic_form_jet(((1.0, 0.0), (0.0, 4.0)), frame)
        return log_sum_exp([(1.0, t), (1.0, -t), (1.0, r), (1.0, -r)])


@dataclass(frozen=True)
class ClosedForm3(PotentialModel):
    """Periodic three-site ring.

    ``as_printed=False`` (default) uses the weight 4 on ``e^-theta cosh x``, which
    reproduces the 8x8 exact diagonalization; ``as_printed=True`` uses weight 2.
    """

    as_printed: bool = False
    name = "closed3"
    n_sites = 3

    @property
    def weight(self):
        return 2.0 if self.as_printed else 4.0

    def jet(self, at, frame=None):
        t, x = self._seeds(at, frame)
        tt, xx, tx = t * t, x * x, t * x
        plus = jet2.cosh_sqrt(4.0 * (tt + tx + xx))
        minus = jet2.cosh_sqrt(4.0 * (tt - tx + xx))
        z = (self.weight * jet2.exp(-t)) * jet2.cosh(x) + 2.0 * jet2.exp(t - x) * plus + 2.0 * jet2.exp(t + x) * minus
        return jet2.ln(z)

    def ray_jet(self, at):
        frame = Frame.ray(at)
        t = linear_jet((1.0, 0.0), frame)
        x = linear_jet((0.0, 1.0), frame)
        sp = quadratic_form_jet(((4.0, 2.0), (2.0, 4.0)), frame)
        sm = quadratic_form_jet(((4.0, -2.0), (-2.0, 4.0)), frame)
        w = self.weight / 2.0
        return log_sum_exp([
            (w, x - t), (w, -t - x),
            (1.0, t - x + sp), (1.0, t - x - sp),
            (1.0, t + x + sm), (1.0, t + x - sm),
        ])


@dataclass(frozen=True)
class ThermoLimit(PotentialModel):
    """Potential density of the infinite chain, ``(1/pi) int_0^pi ln(2 cosh f(k)) dk``."""

    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    name = "thermo"

    def breakpoints(self, at):
        """Uniform base mesh, graded toward the endpoint where ``f`` is smallest when near-singular."""
        t, x = abs(at[0]), abs(at[1])
        edges = np.linspace(0.0, np.pi, self.quad.base_panels + 1)
        big = max(t, x)
        if big == 0 or abs(t - x) >= NEAR_SINGULAR_FRACTION * big or self.quad.graded_panels == 0:
            return edges
        width = edges[-1] - edges[-2]
        graded = width * 0.5 ** np.arange(1, self.quad.graded_panels + 1)
        if at[0] * at[1] >= 0:  # f is smallest at k = pi
            return np.concatenate([edges[:-1], np.pi - graded, [np.pi]])
        return np.concatenate([[0.0], graded[::-1], edges[1:]])

    def _integrate(self, integrand, at):
        return integrate_jet_panels(integrand, self.breakpoints(at), self.quad) / np.pi

    def jet(self, at, frame=None):
        t, x = self._seeds(at, frame)
        tt, xx, tx = t * t, x * x, t * x

        def integrand(k):
            return jet2.ln(2.0 * jet2.cosh_sqrt(tt + xx + tx * (2.0 * np.cos(k))))

        return self._integrate(integrand, at)

    def ray_jet(self, at):
        frame = Frame.ray(at)
        t0, x0 = frame.origin
        rho = frame.rho
        diff_sq = (t0 - x0) * (t0 + x0)

        def integrand(k):
            # f(k)^2 written as a sum of non-negative terms
            if t0 * x0 >= 0:
                a = (t0 - x0) ** 2 + 4.0 * t0 * x0 * np.cos(0.5 * k) ** 2
            else:
                a = (t0 + x0) ** 2 - 4.0 * t0 * x0 * np.sin(0.5 * k) ** 2
            b = diff_sq * np.cos(k) / rho
            d = (rho * np.sin(k)) ** 2
            return jet2.ln2cosh(sqrt_form_jet(a, b, d, rho))

        return self._integrate(integrand, at)


@dataclass(frozen=True)
class ExactDiag(PotentialModel):
    """Finite chain by dense exact diagonalization; derivatives by finite differences."""

    chain: SpinChainSpec = field(default_factory=lambda: SpinChainSpec(2, "open"))
    fd: FdSpec = field(default_factory=FdSpec)
    name = "exact"
    supports_ray = False

    @property
    def n_sites(self):
        return self.chain.n_sites

    def jet(self, at, frame=None):
        if frame is not None and not frame.is_natural():
            raise ConfigError("exact-diagonalization jets are only available in the natural frame")
        return psi_fd_jet(self.chain, at, self.fd)

    def jet_with_error(self, at):
        return fd_jet_with_error(self.chain, at, self.fd)

    def value(self, at):
        return psi_exact(self.chain, at)


def psi_jet(model: PotentialModel, at, frame=None) -> Jet2:
    """Order-3 jet of the potential of ``model`` at ``at`` (natural frame unless given)."""
    return model.jet(NaturalPoint(*at), frame)


# plain scalar formulas, used as references

def psi1_value(z, x):
    r = np.hypot(z, x)
    return r + np.log1p(np.exp(-2.0 * r))  # ln(2 cosh r)


def psi2_value(theta, x):
    return np.log(2.0 * np.cosh(theta) + 2.0 * np.cosh(np.sqrt(theta**2 + 4.0 * x**2)))


def psi3_value(theta, x, as_printed=False):
    w = 2.0 if as_printed else 4.0
    return np.log(
        w * np.exp(-theta) * np.cosh(x)
        + 2.0 * np.exp(theta - x) * np.cosh(2.0 * np.sqrt(theta**2 + theta * x + x**2))
        + 2.0 * np.exp(theta + x) * np.cosh(2.0 * np.sqrt(theta**2 - theta * x + x**2))
    )

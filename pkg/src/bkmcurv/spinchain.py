"""Transverse-field Ising chains by dense exact diagonalization.

Basis convention: bit ``i`` of a basis index encodes the spin on site ``i + 1``;
bit value 0 is spin up (sigma_z = +1).  The potential is

    psi(theta, x) = ln Tr exp(theta * O_int + x * O_field),

with ``O_int = sum_i sz_i sz_{i+1}`` and ``O_field = sum_i sx_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .errors import BoundaryError, ConfigError, EigenError, PrecisionError, SizeError
from .jet2 import INDEX, ORDER, Jet2

MAX_SITES = 14


@dataclass(frozen=True)
class SpinChainSpec:
    n_sites: int
    boundary: str = "open"

    def __post_init__(self):
        if self.boundary not in ("open", "periodic"):
            raise ConfigError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        if not 1 <= self.n_sites <= MAX_SITES:
            raise SizeError(f"n_sites must lie in [1, {MAX_SITES}], got {self.n_sites}")
        if self.boundary == "periodic" and self.n_sites < 3:
            raise BoundaryError(f"periodic boundary requires n_sites >= 3, got {self.n_sites}")

    @property
    def dim(self):
        return 1 << self.n_sites


class ObservablePair(NamedTuple):
    o_int: np.ndarray
    o_field: np.ndarray

    def is_independent(self, tol=1e-12):
        a = np.stack([self.o_int.ravel(), self.o_field.ravel()])
        s = np.linalg.svd(a, compute_uv=False)
        return s[-1] > tol * max(s[0], 1.0)


@dataclass(frozen=True)
class FdSpec:
    base_step: float = 1e-2
    richardson_levels: int = 2
    rel_tol: float = 1e-5

    def __post_init__(self):
        if not self.base_step > 0:
            raise ConfigError("base_step must be positive")
        if self.richardson_levels < 1:
            raise ConfigError("richardson_levels must be >= 1")
        if not self.rel_tol > 0:
            raise ConfigError("rel_tol must be positive")


def spins(n_sites):
    """(dim, n_sites) array of sigma_z eigenvalues of every basis state."""
    idx = np.arange(1 << n_sites)[:, None]
    return 1 - 2 * ((idx >> np.arange(n_sites)) & 1)


def build_observables(spec: SpinChainSpec) -> ObservablePair:
    n, dim = spec.n_sites, spec.dim
    s = spins(n)
    bonds = n if spec.boundary == "periodic" else n - 1
    diag = np.zeros(dim)
    for i in range(bonds):
        diag += s[:, i] * s[:, (i + 1) % n]
    o_int = np.diag(diag)
    o_field = np.zeros((dim, dim))
    rows = np.arange(dim)
    for i in range(n):
        o_field[rows, rows ^ (1 << i)] = 1.0
    return ObservablePair(o_int, o_field)


def _observables(chain):
    return chain if isinstance(chain, ObservablePair) else build_observables(chain)


def spectrum(chain, at):
    """Eigenvalues of ``p1 * O_int + p2 * O_field`` (ascending)."""
    obs = _observables(chain)
    p1, p2 = at
    try:
        return np.linalg.eigvalsh(p1 * obs.o_int + p2 * obs.o_field)
    except np.linalg.LinAlgError as exc:
        raise EigenError(f"eigensolver failed at {tuple(at)}: {exc}") from exc


def psi_exact(chain, at):
    """``ln Tr exp(p1 O_int + p2 O_field)`` via a stable log-sum-exp of the spectrum."""
    return float(logsumexp(spectrum(chain, at)))


def _psi_many(obs, p1, p2):
    mats = p1[:, None, None] * obs.o_int + p2[:, None, None] * obs.o_field
    try:
        lam = np.linalg.eigvalsh(mats)
    except np.linalg.LinAlgError as exc:
        raise EigenError(f"eigensolver failed on a finite-difference stencil: {exc}") from exc
    return logsumexp(lam, axis=-1)


# 5-point central difference weights on offsets -2..2 (units of the step)
_W = {
    0: np.array([0.0, 0.0, 1.0, 0.0, 0.0]),
    1: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
    2: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
    3: np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0,
}
# leading error exponent of the tensor stencil per coefficient; later terms step by 2
_LEADING_ORDER = np.array([2.0 if 3 in ab else 4.0 for ab in INDEX])
_OFFSETS = np.arange(-2, 3)


def fd_jet(fn, at, fd=FdSpec()):
    """Finite-difference jet of a scalar function plus a per-coefficient error estimate.

    ``fn(p1, p2)`` must accept equal-length arrays and return the values.
    Stencils are 5x5 tensor grids at steps ``h, 2h, 4h, ...`` per axis with
    ``h_i = base_step * max(1, |p_i|)``; ``richardson_levels`` extrapolation steps
    are applied per coefficient (with that coefficient's own error exponents) and
    the error estimate is the change made by the last step.
    """
    p = np.asarray(at, dtype=float)
    h = fd.base_step * np.maximum(1.0, np.abs(p))
    levels = fd.richardson_levels
    mults = [2**j for j in range(levels + 1)]
    # shared evaluation of every stencil point, keyed by integer offsets in units of h
    keys = sorted({(int(i * m), int(j * m)) for m in mults for i in _OFFSETS for j in _OFFSETS})
    ki = np.array(keys, dtype=float)
    values = dict(zip(keys, np.asarray(fn(p[0] + ki[:, 0] * h[0], p[1] + ki[:, 1] * h[1]), dtype=float)))

    estimates = []
    for m in mults:
        grid = np.array([[values[(int(i * m), int(j * m))] for j in _OFFSETS] for i in _OFFSETS])
        step = m * h
        est = np.empty(10)
        for k, (a, b) in enumerate(INDEX):
            d = _W[a] @ grid @ _W[b] / (step[0] ** a * step[1] ** b)
            est[k] = d / (math.factorial(a) * math.factorial(b))
        estimates.append(est)

    table = estimates
    for lvl in range(levels):
        f = 2.0 ** (_LEADING_ORDER + 2 * lvl)
        prev = table[0]
        table = [(f * table[i] - table[i + 1]) / (f - 1.0) for i in range(len(table) - 1)]
    best = table[0]
    return Jet2(best), Jet2(np.abs(best - prev))


def fd_jet_with_error(chain, at, fd=FdSpec()):
    """Finite-difference jet of ``psi_exact`` and its error estimate (see :func:`fd_jet`)."""
    obs = _observables(chain)
    return fd_jet(lambda p1, p2: _psi_many(obs, p1, p2), at, fd)


def check_fd_error(jet, err, rel_tol):
    """Raise :class:`PrecisionError` if any order-2/3 coefficient error exceeds ``rel_tol``.

    Errors are measured relative to the largest coefficient of the same total
    order, so coefficients that vanish by symmetry do not trip the check.
    """
    c, e = np.abs(jet.c), err.c
    worst = None
    for order in (2, 3):
        sel = np.flatnonzero(ORDER == order)
        scale = c[sel].max() or 1.0
        rel = e[sel] / scale
        k = int(np.argmax(rel))
        if worst is None or rel[k] > worst[1]:
            worst = (INDEX[sel[k]], float(rel[k]))
    if worst[1] > rel_tol:
        (a, b), rel = worst
        raise PrecisionError(
            f"finite-difference Richardson levels disagree on c{a}{b} by {rel:.3g} (relative) > rel_tol={rel_tol:g}",
            {"coefficient": (a, b), "relative_error": rel, "rel_tol": rel_tol},
        )


def psi_fd_jet(chain, at, fd=FdSpec()):
    """Order-3 jet of the exact-diagonalization potential by Richardson-extrapolated differences."""
    jet, err = fd_jet_with_error(chain, at, fd)
    check_fd_error(jet, err, fd.rel_tol)
    return jet

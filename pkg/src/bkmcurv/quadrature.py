"""Panel-wise adaptive Gauss-Legendre integration of jet-valued integrands."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import ConfigError, ConvergenceError
from .jet2 import INDEX, ORDER, Jet2


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_panel: int = 64
    base_panels: int = 8
    refine_rel_tol: float = 1e-11
    max_depth: int = 12
    # extra geometrically graded panels toward a near-singular endpoint
    graded_panels: int = 8
    # absolute floor per unit length, relative to the whole-interval L1 norm of
    # the largest same-order coefficient
    noise_floor: float = 1e-13

    def __post_init__(self):
        if self.nodes_per_panel < 2:
            raise ConfigError("nodes_per_panel must be >= 2")
        if self.base_panels < 1:
            raise ConfigError("base_panels must be >= 1")
        if not self.refine_rel_tol > 0:
            raise ConfigError("refine_rel_tol must be positive")
        if self.max_depth < 0:
            raise ConfigError("max_depth must be >= 0")

    def doubled(self):
        """Same spec with twice the nodes per panel."""
        return replace(self, nodes_per_panel=2 * self.nodes_per_panel)


@lru_cache(maxsize=16)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_rule(edges, n):
    """Nodes (n_panels, n) and weights for the panels delimited by ``edges``."""
    x, w = _leggauss(n)
    a, b = edges[:, 0:1], edges[:, 1:2]
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def _estimate(integrand, edges, n):
    """Per-panel integral and L1 norm, both shaped (10, n_panels)."""
    nodes, weights = _panel_rule(edges, n)
    flat = nodes.ravel()
    c = integrand(flat).c
    if c.shape[1:] != flat.shape:  # integrand independent of the abscissa
        c = np.broadcast_to(c.reshape(10, -1), (10, flat.size))
    vals = c.reshape((10,) + nodes.shape)
    return (vals * weights).sum(axis=-1), (np.abs(vals) * weights).sum(axis=-1)


def integrate_jet_panels(integrand, breakpoints, spec=QuadratureSpec()):
    """Integrate ``integrand`` over consecutive panels given by sorted ``breakpoints``.

    ``integrand`` maps a 1-D array of abscissae to a :class:`Jet2` batched over them.
    Every panel is compared against its two halves; panels whose ten coefficients
    all agree to ``refine_rel_tol`` (relative to the panel's L1 norm of that
    coefficient) are accepted, the rest are bisected, up to ``max_depth`` levels.
    Changes below ``noise_floor`` times the whole-interval L1 norm of the
    largest coefficient of the same total order (prorated by panel width) count
    as converged: rounding inside the integrand limits the attainable absolute
    accuracy of small coefficients, and that limit does not shrink on bisection.
    """
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0):
        raise ConfigError("breakpoints must be strictly increasing with at least two entries")
    n = spec.nodes_per_panel
    edges = np.column_stack([bp[:-1], bp[1:]])
    coarse, coarse_l1 = _estimate(integrand, edges, n)
    total_l1 = coarse_l1.sum(axis=1)
    order_l1 = np.empty(10)
    for order in range(4):
        sel = ORDER == order
        order_l1[sel] = total_l1[sel].max()
    density = spec.noise_floor * order_l1[:, None] / (bp[-1] - bp[0])
    depth = 0
    total = np.zeros(10)
    while edges.shape[0]:
        mids = 0.5 * (edges[:, 0] + edges[:, 1])
        halves = np.empty((2 * edges.shape[0], 2))
        halves[0::2, 0], halves[0::2, 1] = edges[:, 0], mids
        halves[1::2, 0], halves[1::2, 1] = mids, edges[:, 1]
        half_val, half_l1 = _estimate(integrand, halves, n)
        fine = half_val[:, 0::2] + half_val[:, 1::2]
        l1 = half_l1[:, 0::2] + half_l1[:, 1::2]
        err = np.abs(fine - coarse)
        floor = density * (edges[:, 1] - edges[:, 0])
        ok = np.all((err <= spec.refine_rel_tol * l1) | (err <= floor), axis=0)
        total += fine[:, ok].sum(axis=1)
        if np.all(ok):
            break
        if depth >= spec.max_depth:
            ratio = np.where(l1 > 0, err / np.where(l1 > 0, l1, 1.0), 0.0)
            k, p = np.unravel_index(np.argmax(ratio[:, ~ok]), ratio[:, ~ok].shape)
            bad = edges[~ok][p]
            worst = {"coefficient": INDEX[k], "panel": (float(bad[0]), float(bad[1])),
                     "relative_change": float(ratio[:, ~ok][k, p])}
            raise ConvergenceError(
                f"adaptive quadrature exceeded max_depth={spec.max_depth}; worst coefficient c{INDEX[k][0]}{INDEX[k][1]} "
                f"changed by {worst['relative_change']:.3g} (relative) on panel [{bad[0]:.6g}, {bad[1]:.6g}]",
                worst,
            )
        split = np.repeat(~ok, 2)
        edges = halves[split]
        coarse = half_val[:, split]
        depth += 1
    return Jet2(total)


def integrate_jet_panel(integrand, a, b, spec=QuadratureSpec()):
    """Adaptive Gauss-Legendre estimate of the integral of a jet over ``[a, b]``."""
    if not a < b:
        raise ConfigError(f"empty interval [{a}, {b}]")
    return integrate_jet_panels(integrand, [a, b], spec)

"""Hessian geometry of a two-parameter exponential family from a potential jet.

The metric is the Hessian of the potential, the Christoffel symbols of the
first kind are half its third derivatives, and the scalar curvature uses the
sign convention in which a sphere has negative curvature.  Two independent
routes to the scalar curvature are evaluated and compared:

* the closed 2D determinant formula  R = det[[p11, p12, p22], [p111, p112, p122],
  [p112, p122, p222]] / (2 det(g)^2);
* the full Riemann tensor R_ijkl = 1/4 g^ab (p_aik p_bjl - p_ail p_bjk),
  contracted twice with the inverse metric.

All formulas hold in any affine frame of the natural parameters, so jets
expanded in a rotated frame are accepted; pass the frame ``basis`` to get the
reported tensor components back in natural coordinates.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateMetricError, InternalMismatchError

DEGENERACY_TOL = 1e-12
CROSS_CHECK_RTOL = 1e-9
R_SWITCH = 1e-2


@dataclass(frozen=True)
class CurvatureReport:
    g11: float
    g12: float
    g22: float
    det_g: float
    # Christoffel symbols of the first kind, Gamma_ijk = psi_ijk / 2; the other
    # index orderings follow by total symmetry
    gamma_111: float
    gamma_112: float
    gamma_122: float
    gamma_222: float
    r1212: float
    scalar_r: float
    scalar_r_contraction: float
    condition: float

    def as_dict(self):
        return asdict(self)


def derivative_tensors(psi):
    """Raw Hessian (2x2) and third-derivative tensor (2x2x2) from a jet."""
    c = psi.c
    g = np.array([[2 * c[3], c[4]], [c[4], 2 * c[5]]], dtype=float)
    p111, p112, p122, p222 = 6 * c[6], 2 * c[7], 2 * c[8], 6 * c[9]
    t = np.array([[[p111, p112], [p112, p122]], [[p112, p122], [p122, p222]]], dtype=float)
    return g, t


def _check_metric(g, tol):
    g11, g12, g22 = g[0, 0], g[0, 1], g[1, 1]
    det = g11 * g22 - g12 * g12
    ok = np.isfinite(det) and g11 > 0 and g22 > 0 and det > tol * g11 * g22
    if not ok:
        raise DegenerateMetricError(
            f"metric is degenerate or indefinite: g11={g11:.6g}, g12={g12:.6g}, g22={g22:.6g}, det={det:.6g}"
        )
    return det


def metric_from_jet(psi, tol=DEGENERACY_TOL):
    """Metric components ``(g11, g12, g22)``; raises on a degenerate metric."""
    g, _ = derivative_tensors(psi)
    _check_metric(g, tol)
    return g[0, 0], g[0, 1], g[1, 1]


def curvature_determinant_form(g, t):
    """Scalar curvature by the 3x3 determinant formula; also returns a rounding scale."""
    m = np.array([[g[0, 0], g[0, 1], g[1, 1]],
                  [t[0, 0, 0], t[0, 0, 1], t[0, 1, 1]],
                  [t[0, 0, 1], t[0, 1, 1], t[1, 1, 1]]])
    products = np.array([
        m[0, 0] * m[1, 1] * m[2, 2], m[0, 1] * m[1, 2] * m[2, 0], m[0, 2] * m[1, 0] * m[2, 1],
        -m[0, 2] * m[1, 1] * m[2, 0], -m[0, 0] * m[1, 2] * m[2, 1], -m[0, 1] * m[1, 0] * m[2, 2],
    ])
    det_g = g[0, 0] * g[1, 1] - g[0, 1] ** 2
    denom = 2.0 * det_g * det_g
    return products.sum() / denom, np.abs(products).sum() / denom


def riemann_tensor(g, t):
    """All components R_ijkl = 1/4 g^ab (t_aik t_bjl - t_ail t_bjk)."""
    ginv = np.linalg.inv(g)
    first = np.einsum("ab,aik,bjl->ijkl", ginv, t, t)
    return 0.25 * (first - first.transpose(0, 1, 3, 2))


def curvature_contraction_form(g, t):
    """Scalar curvature as the double contraction g^ik g^jl R_ijkl."""
    ginv = np.linalg.inv(g)
    return float(np.einsum("ik,jl,ijkl->", ginv, ginv, riemann_tensor(g, t)))


def scalar_curvature(psi, basis=None, rtol=CROSS_CHECK_RTOL, degeneracy_tol=DEGENERACY_TOL):
    """Full :class:`CurvatureReport` at the expansion point of ``psi``.

    ``basis`` (2x2, orthonormal columns) is the frame in which ``psi`` was
    expanded; metric and Christoffel components are reported in natural
    coordinates.  Determinant, ``r1212`` and ``scalar_r`` are frame invariant.
    """
    g, t = derivative_tensors(psi)
    det_g = _check_metric(g, degeneracy_tol)
    r_det, scale = curvature_determinant_form(g, t)
    r_con = curvature_contraction_form(g, t)
    # contraction errors are bounded by the same rounding scale as the determinant
    if not abs(r_det - r_con) <= rtol * max(abs(r_det), abs(r_con)) + 64 * np.finfo(float).eps * scale:
        raise InternalMismatchError(
            f"determinant form R={r_det!r} and contraction form R={r_con!r} disagree beyond rtol={rtol:g}"
        )
    r1212 = 0.5 * r_det * det_g
    eig = np.linalg.eigvalsh(g)
    if basis is not None:
        b = np.asarray(basis, dtype=float)
        g = b @ g @ b.T
        t = np.einsum("ai,bj,ck,ijk->abc", b, b, b, t)
    return CurvatureReport(
        g11=float(g[0, 0]), g12=float(g[0, 1]), g22=float(g[1, 1]), det_g=float(det_g),
        gamma_111=float(t[0, 0, 0] / 2), gamma_112=float(t[0, 0, 1] / 2),
        gamma_122=float(t[0, 1, 1] / 2), gamma_222=float(t[1, 1, 1] / 2),
        r1212=float(r1212), scalar_r=float(r_det), scalar_r_contraction=r_con,
        condition=float(eig[-1] / eig[0]),
    )


def r1_closed_form(r):
    """Scalar curvature of the single-qubit family as a function of ``r = sqrt(z^2 + x^2)``.

    Below ``R_SWITCH`` the two leading ``1/(2 r^2)`` terms cancel catastrophically,
    so the series ``4 r^2 / 9 + 16 r^4 / 135`` is used instead.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    with np.errstate(all="ignore"):
        th = np.tanh(r)
        direct = (2 * r - th) / (2 * r * r * th) * np.cosh(r) ** 2 - (1 + th * th) / (2 * th * th)
    series = 4 * r**2 / 9 + 16 * r**4 / 135
    out = np.where(r <= R_SWITCH, series, direct)
    return float(out) if out.ndim == 0 else out

"""Temperature sweeps of the scalar curvature and their classification.

The natural parameters at temperature ``T`` are ``theta = J / T`` and
``x = Gamma / T`` (``z = h / T`` for the single qubit, where ``j`` plays the
role of ``h``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import linregress

from .errors import (
    ConfigError,
    DegenerateMetricError,
    InsufficientDataError,
    InternalMismatchError,
    NonPositiveCurvatureError,
    PrecisionError,
)
from .geometry import scalar_curvature
from .jet2 import ORDER, Jet2
from .potentials import ExactDiag, Frame, PotentialModel
from .spinchain import check_fd_error

QUALITY_FLAGS = ("ok", "degenerate", "fd_noisy")
# relative curvature uncertainty above which a finite-difference point is flagged
FD_CURVATURE_RTOL = 1e-5
MIN_OK_FRACTION = 0.9
MIN_FIT_POINTS = 8


@dataclass(frozen=True)
class SweepConfig:
    model: PotentialModel
    j: float
    gamma: float
    t_min: float = 0.05
    t_max: float = 50.0
    n_points: int = 400
    mono_tol: float = 1e-9
    neg_tol: float = 1e-9

    def __post_init__(self):
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max) and 0 < self.t_min < self.t_max):
            raise ConfigError(f"temperature bounds must satisfy 0 < t_min < t_max, got [{self.t_min}, {self.t_max}]")
        if self.n_points < 2:
            raise ConfigError(f"n_points must be >= 2, got {self.n_points}")
        if not (math.isfinite(self.j) and math.isfinite(self.gamma)):
            raise ConfigError("j and gamma must be finite")
        if self.gamma == 0:
            raise ConfigError("gamma must be nonzero: at x = 0 the two observables commute and the metric degenerates")
        if self.mono_tol < 0 or self.neg_tol < 0:
            raise ConfigError("tolerances must be non-negative")

    def temperatures(self):
        return np.geomspace(self.t_min, self.t_max, self.n_points)


@dataclass(frozen=True)
class CurvePoint:
    t: float
    theta: float
    x: float
    psi: float
    g11: float
    g12: float
    g22: float
    det_g: float
    r1212: float
    scalar_r: float
    quality: str
    # contraction-form value of R, kept for the formula cross-check
    scalar_r_contraction: float = float("nan")

    @property
    def ok(self):
        return self.quality == "ok"

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class MonotonicityVerdict:
    classification: str
    violations: list = field(default_factory=list)
    min_r: float = float("nan")
    negative_windows: list = field(default_factory=list)
    r_at_tmax: float = float("nan")

    @property
    def monotone(self):
        return self.classification == "monotone_decreasing"

    def as_dict(self):
        d = asdict(self)
        d["violations"] = [list(w) for w in self.violations]
        d["negative_windows"] = [list(w) for w in self.negative_windows]
        return d


def _model_jet(model, at):
    """Jet, frame basis (or None) and a flag for finite-difference noise."""
    if isinstance(model, ExactDiag):
        jet, err = model.jet_with_error(at)
        return jet, None, err
    if model.supports_ray and (at[0] != 0 or at[1] != 0):
        return model.ray_jet(at), Frame.ray(at).basis, None
    return model.jet(at), None, None


def _fd_curvature_spread(jet, err, r):
    """Largest change of R when one order-2/3 coefficient moves by its error estimate."""
    spread = 0.0
    for k in np.flatnonzero(ORDER >= 2):
        if err.c[k] == 0:
            continue
        for sign in (1.0, -1.0):
            c = jet.c.copy()
            c[k] += sign * err.c[k]
            try:
                spread = max(spread, abs(scalar_curvature(Jet2(c), rtol=np.inf).scalar_r - r))
            except DegenerateMetricError:
                return math.inf
    return spread


def evaluate_point(model, t, j, gamma):
    """One :class:`CurvePoint` at temperature ``t``; geometry failures become quality flags."""
    theta, x = j / t, gamma / t
    at = (theta, x)
    nan = float("nan")
    quality = "ok"
    try:
        jet, basis, err = _model_jet(model, at)
    except PrecisionError:
        # the FD jet is still usable for a flagged, approximate point
        jet, err = model.jet_with_error(at)
        basis, quality = None, "fd_noisy"
    psi = float(model.value(at)) if isinstance(model, ExactDiag) else float(jet.value)
    try:
        rep = scalar_curvature(jet, basis=basis)
    except DegenerateMetricError:
        return CurvePoint(t, theta, x, psi, nan, nan, nan, nan, nan, nan, "degenerate")
    except InternalMismatchError:
        rep = scalar_curvature(jet, basis=basis, rtol=np.inf)
        quality = "fd_noisy"
    if err is not None and quality == "ok":
        try:
            check_fd_error(jet, err, model.fd.rel_tol)
        except PrecisionError:
            quality = "fd_noisy"
        else:
            if _fd_curvature_spread(jet, err, rep.scalar_r) > FD_CURVATURE_RTOL * abs(rep.scalar_r):
                quality = "fd_noisy"
    return CurvePoint(
        t=float(t), theta=float(theta), x=float(x), psi=psi,
        g11=rep.g11, g12=rep.g12, g22=rep.g22, det_g=rep.det_g,
        r1212=rep.r1212, scalar_r=rep.scalar_r, quality=quality,
        scalar_r_contraction=rep.scalar_r_contraction,
    )


def sweep(config: SweepConfig):
    """Curve points on the log-spaced temperature grid, ascending in ``T``."""
    return [evaluate_point(config.model, t, config.j, config.gamma) for t in config.temperatures()]


def _runs(mask, lo, hi):
    """Maximal runs of True in ``mask`` as ``(lo[start], hi[end])`` intervals."""
    out = []
    start = None
    for i, m in enumerate(mask):
        if m and start is None:
            start = i
        if not m and start is not None:
            out.append((float(lo[start]), float(hi[i - 1])))
            start = None
    if start is not None:
        out.append((float(lo[start]), float(hi[len(mask) - 1])))
    return out


def classify(points, mono_tol=1e-9, neg_tol=1e-9):
    """Monotonicity verdict over the ok-points of a sweep sorted by temperature.

    A violation is a maximal run of consecutive ok-points where R increases by
    more than ``mono_tol * max(1, |R|)``.
    """
    if len(points) < 2:
        raise InsufficientDataError(f"need at least 2 points, got {len(points)}")
    ts = np.array([p.t for p in points])
    if np.any(np.diff(ts) <= 0):
        raise InsufficientDataError("points must be sorted by strictly increasing temperature")
    good = [p for p in points if p.ok]
    if len(good) < 2 or len(good) < MIN_OK_FRACTION * len(points):
        raise InsufficientDataError(
            f"only {len(good)} of {len(points)} points have quality ok (need {MIN_OK_FRACTION:.0%})"
        )
    t = np.array([p.t for p in good])
    r = np.array([p.scalar_r for p in good])
    rise = np.diff(r) > mono_tol * np.maximum(1.0, np.maximum(np.abs(r[:-1]), np.abs(r[1:])))
    violations = _runs(rise, t[:-1], t[1:])
    negative = _runs(r < -neg_tol, t, t)
    return MonotonicityVerdict(
        classification="non_monotone" if violations else "monotone_decreasing",
        violations=violations,
        min_r=float(r.min()),
        negative_windows=negative,
        r_at_tmax=float(r[-1]),
    )


@dataclass(frozen=True)
class ScanRow:
    gamma: float
    verdict: MonotonicityVerdict | None
    error: str | None = None

    def as_dict(self):
        d = {"gamma": self.gamma}
        if self.verdict is not None:
            v = self.verdict
            d.update(classification=v.classification, violations=[list(w) for w in v.violations],
                     min_r=v.min_r, negative_windows=[list(w) for w in v.negative_windows],
                     r_at_tmax=v.r_at_tmax)
        else:
            d.update(classification="error", error=self.error)
        return d


def scan_gamma(model, j, gammas, sweep_defaults: SweepConfig | None = None):
    """One verdict per transverse field, in the given order; failures become error rows."""
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ConfigError("gammas must be nonempty")
    if any(g == 0 for g in gammas):
        raise ConfigError("every gamma must be nonzero")
    base = sweep_defaults
    rows = []
    for g in gammas:
        try:
            if base is None:
                cfg = SweepConfig(model=model, j=j, gamma=g)
            else:
                cfg = SweepConfig(model=model, j=j, gamma=g, t_min=base.t_min, t_max=base.t_max,
                                  n_points=base.n_points, mono_tol=base.mono_tol, neg_tol=base.neg_tol)
            verdict = classify(sweep(cfg), cfg.mono_tol, cfg.neg_tol)
            rows.append(ScanRow(g, verdict))
        except Exception as exc:  # noqa: BLE001 - a failed row must not abort the scan
            rows.append(ScanRow(g, None, f"{type(exc).__name__}: {exc}"))
    return rows


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    amplitude: float
    r_squared: float
    n_points: int

    def __iter__(self):
        return iter((self.exponent, self.amplitude, self.r_squared))


def powerlaw_fit(points, t_lo, t_hi):
    """Least-squares fit ``R = amplitude * T**exponent`` over ok-points in ``[t_lo, t_hi]``."""
    sel = [p for p in points if p.ok and t_lo <= p.t <= t_hi]
    if len(sel) < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"power-law fit needs at least {MIN_FIT_POINTS} ok-points in [{t_lo}, {t_hi}], got {len(sel)}"
        )
    r = np.array([p.scalar_r for p in sel])
    if np.any(~(r > 0)):
        raise NonPositiveCurvatureError(f"scalar curvature must be positive in the fit window, min is {r.min()!r}")
    t = np.array([p.t for p in sel])
    fit = linregress(np.log(t), np.log(r))
    return PowerLawFit(float(fit.slope), float(np.exp(fit.intercept)), float(fit.rvalue**2), len(sel))

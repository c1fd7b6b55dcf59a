"""Scalar curvature of the BKM metric on transverse-field Ising exponential families."""

from .analysis import (
    CurvePoint,
    MonotonicityVerdict,
    SweepConfig,
    classify,
    evaluate_point,
    powerlaw_fit,
    scan_gamma,
    sweep,
)
from .errors import (
    BKMError,
    BoundaryError,
    ConfigError,
    ConvergenceError,
    DegenerateMetricError,
    DomainError,
    EigenError,
    InsufficientDataError,
    InternalMismatchError,
    NonPositiveCurvatureError,
    PrecisionError,
    SizeError,
)
from .geometry import CurvatureReport, r1_closed_form, scalar_curvature
from .jet2 import Jet2
from .potentials import (
    ClosedForm1,
    ClosedForm2,
    ClosedForm3,
    ExactDiag,
    NaturalPoint,
    PotentialModel,
    ThermoLimit,
    psi_jet,
)
from .quadrature import QuadratureSpec
from .spinchain import FdSpec, SpinChainSpec, build_observables, psi_exact, psi_fd_jet

__version__ = "0.1.0"

__all__ = [
    "BKMError",
    "BoundaryError",
    "ClosedForm1",
    "ClosedForm2",
    "ClosedForm3",
    "ConfigError",
    "ConvergenceError",
    "CurvatureReport",
    "CurvePoint",
    "DegenerateMetricError",
    "DomainError",
    "EigenError",
    "ExactDiag",
    "FdSpec",
    "InsufficientDataError",
    "InternalMismatchError",
    "Jet2",
    "MonotonicityVerdict",
    "NaturalPoint",
    "NonPositiveCurvatureError",
    "PotentialModel",
    "PrecisionError",
    "QuadratureSpec",
    "SizeError",
    "SpinChainSpec",
    "SweepConfig",
    "ThermoLimit",
    "build_observables",
    "classify",
    "evaluate_point",
    "powerlaw_fit",
    "psi_exact",
    "psi_fd_jet",
    "psi_jet",
    "r1_closed_form",
    "scalar_curvature",
    "scan_gamma",
    "sweep",
]

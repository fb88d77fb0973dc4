"""Reconstruct space curves from curvature and torsion.

The core route solves a scalar second-order equation for the ``e3``
component of the tangent and integrates the curve from it in polar form;
a classical Frenet-Serret integrator serves as an independent check.
"""
from .curves import FrenetFrame, RigidMotion, SampledCurve, orthonormalize, uniform_grid
from .errors import (
    ChartBoundaryError,
    CurveForgeError,
    DegenerateCurveError,
    ExprDomainError,
    ExprError,
    ExprSyntaxError,
    GridMismatchError,
    InitialConditionError,
    NegativeRadicandError,
    NonFiniteOutputError,
    PoleError,
    ProfileError,
    RestartLimitError,
    SlantDomainError,
    UnknownIdentifierError,
)
from .expr import ScalarExpr, evaluate, parse, to_text
from .frenet import (
    CurvatureEstimate,
    estimate_frames,
    estimate_kappa_tau,
    frenet_integrate,
    initial_conditions_from_frame,
    kabsch_align,
)
from .helices import HelixClass, classify, general_helix, sigma_from_samples, sigma_invariant, slant_helix, slant_tau
from .ode import IntrinsicProfile, Termination, WSolution, WState, radicand, solve_w, w_rhs
from .output import RunReport, read_curve_csv, write_curve_csv
from .reconstruct import Reconstruction, check_invariants, position, reconstruct, theta_integral

__version__ = "0.1.0"

"""Surface superconductivity boundary-layer toolkit.

Effective 1D models for the superconducting sheath between the second and
third critical fields: the linear half-line oscillator and its de Gennes
constant, nonlinear boundary-layer profiles with and without curvature,
exact integral identities certifying the solutions, the curvature
coefficients of the boundary quartic mass, smooth boundary geometry, and an
independent radial disc Ginzburg-Landau check.
"""

from .coefficients import (
    CoefficientRow,
    LimitingRow,
    PerturbationDiagnostics,
    SignScanResult,
    coefficient_row,
    limiting_check,
    perturbation_check,
    sign_scan,
    sweep,
)
from .disc2d import (
    DiscParams,
    DiscSolution,
    DiscTheoremReport,
    EnergyIdentityReport,
    check_energy_identity,
    check_theorem,
    quartic_mass,
    solve_disc,
)
from .errors import (
    BracketError,
    GeometryError,
    InvalidParameterError,
    NonConvergenceError,
    SurfscError,
    TruncationError,
    UnconvergedInputError,
)
from .geometry import (
    BoundaryCurve,
    BoundarySegment,
    CircleDescriptor,
    EllipseDescriptor,
    FourierRadialDescriptor,
    QuarticMassPrediction,
    curvature_integral,
    curve_from_descriptor,
    parse_curve_descriptor,
    predict_density_per_arclength,
    predict_quartic_mass,
)
from .grid import HalfLineGrid, differentiate, integrate, integrate_upto, make_grid
from .identities import (
    CorrectionClosed,
    IdentityReport,
    correction_closed,
    correction_direct,
    verify_all,
)
from .profile1d import (
    CurvedSolution,
    HalfPlaneSolution,
    ModelParams,
    curved_grid,
    energy_breakdown,
    optimize_alpha_halfplane,
    solve_curved,
    solve_f_given_alpha,
)
from .spectral import (
    LinearMode,
    Theta0Result,
    compute_theta0,
    lowest_mode,
    reference_theta0,
)

__version__ = "0.1.0"

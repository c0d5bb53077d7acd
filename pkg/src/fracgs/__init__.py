"""Numerical ground states of the coupled critical/subcritical fractional system.

Core surfaces:
  spectral    periodic grids, the (-Delta)^s multiplier, norms and quadrature
  model       parameter validation, energies, the Nehari fibering machinery
  scalar      Petviashvili solver for (-Delta)^s u + beta u = gamma u^p
  thresholds  sharp constants S_s / C_(p+1) and the closed-form thresholds
  system      Nehari-constrained descent, verdicts, bubbles, dichotomy scans
  cli         config-driven runs with CSV/JSON artifacts
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConstraintViolation,
    FracgsError,
    GridMismatch,
    InconsistentEstimate,
    IoFailure,
    NoConvergence,
    NoInteriorMinimum,
    NonConverged,
    NonMonotoneVerdicts,
    NonpositiveA,
    NonpositiveProfile,
    NonpositiveT,
    NotSuperThreshold,
    ScaleClash,
    SymmetryLost,
    ZeroPair,
)
from .model import (
    EnergyBreakdown,
    NehariResidual,
    ProblemParams,
    energy_crit,
    energy_scalar,
    energy_system,
    nehari_project,
    nehari_residual,
    nehari_root,
    validate_params,
)
from .scalar import (
    ScalarGroundState,
    extract_c_p1,
    scaled_energy,
    solve_scalar,
)
from .spectral import Field, FieldPair, SpectralGrid, frac_laplacian
from .system import (
    BubbleFamily,
    GroundStateRun,
    ansatz_bound_a0,
    build_bubble,
    build_seeds,
    dichotomy_scan,
    minimize_on_nehari,
)
from .thresholds import (
    SharpConstants,
    ThresholdReport,
    compute_lambda_tilde,
    compute_mu0,
    compute_s_s,
    coupling_gap,
    critical_level,
    mu0_bar,
    threshold_report,
)

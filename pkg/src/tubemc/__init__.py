"""Channel response of a diffusive link in a cylindrical tube with an
absorbing ring receiver: analytic series model, Brownian-dynamics simulator,
and comparison metrics."""

from .analytic import (
    DEFAULT_QUAD_TOL,
    EPS_TRUNC,
    CrossingTimes,
    SeriesModel,
    Truncation,
    adaptive_quadrature,
    alpha_coeff,
    arrival_probability,
    arrival_rate,
    axial_concentration,
    beta_coeff,
    c_mn,
    concentration,
    conditional_survival,
    default_crossing_times,
    gamma_coeff,
    radial_concentration,
    survival,
)
from .curves import CURVE_KINDS, ResponseCurve, read_response_csv, write_response_csv
from .errors import (
    DomainError,
    NumericalError,
    TubeMCError,
    UndefinedMetricError,
    ValidationError,
)
from .mcsim import (
    EnsembleResult,
    ParticleState,
    ReplicationRecord,
    SimConfig,
    particle_rng,
    run_ensemble,
    run_replication,
    simulate_particle,
    step,
)
from .metrics import CurvePair, align, nmse, nrmse, rmse
from .scenario import RegimeReport, Scenario, peclet, reynolds, validate_regime
from .specfun import (
    BesselRootTable,
    InverseGaussianParams,
    bessel_j,
    bessel_root,
    bessel_root_table,
    ig_cdf,
    ig_pdf,
    ig_tail,
    ig_tilted_partial,
    q_function,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_QUAD_TOL",
    "EPS_TRUNC",
    "CURVE_KINDS",
    "BesselRootTable",
    "CrossingTimes",
    "CurvePair",
    "DomainError",
    "EnsembleResult",
    "InverseGaussianParams",
    "NumericalError",
    "ParticleState",
    "RegimeReport",
    "ReplicationRecord",
    "ResponseCurve",
    "Scenario",
    "SeriesModel",
    "SimConfig",
    "TubeMCError",
    "Truncation",
    "UndefinedMetricError",
    "ValidationError",
    "adaptive_quadrature",
    "align",
    "alpha_coeff",
    "arrival_probability",
    "arrival_rate",
    "axial_concentration",
    "bessel_j",
    "bessel_root",
    "bessel_root_table",
    "beta_coeff",
    "c_mn",
    "concentration",
    "conditional_survival",
    "default_crossing_times",
    "gamma_coeff",
    "ig_cdf",
    "ig_pdf",
    "ig_tail",
    "ig_tilted_partial",
    "nmse",
    "nrmse",
    "particle_rng",
    "peclet",
    "q_function",
    "radial_concentration",
    "read_response_csv",
    "reynolds",
    "rmse",
    "run_ensemble",
    "run_replication",
    "simulate_particle",
    "step",
    "survival",
    "validate_regime",
    "write_response_csv",
]

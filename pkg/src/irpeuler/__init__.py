"""Invariant-region-preserving finite-volume tools for 1D compressible
Euler flow with a general convex equation of state.

The package provides

* an equation-of-state contract (energy form e = F(s, v)) with
  polytropic and Tait models and thermodynamic stability checks,
* the convex invariant region {rho > 0, R > 0, q < 0} with closed-form
  convexity verification of the entropy-deficit constraint q,
* a limiter that rescales high-order reconstructions into the region
  without touching cell averages or the order of accuracy,
* a MUSCL / SSP-RK2 finite-volume host scheme with runtime invariant
  diagnostics, and
* a config-driven CLI with delimited output, rendered figures and
  independent verification oracles (exact polytropic Riemann solver,
  finite-difference Hessians).
"""

from . import config, output
from .eos import (
    DimensionlessQuantities,
    EosSpec,
    PolytropicEos,
    PolytropicParams,
    ReferenceScales,
    StabilityReport,
    TaitEos,
    TaitParams,
    ThermoState,
    check_thermo_stability,
    dimensionless_quantities,
    entropy_derivatives,
    generic_entropy_from_ev,
    polytropic_F,
    polytropic_entropy_from_ev,
    pressure,
    pressure_from_ev,
    sound_speed,
    tait_F,
    tait_entropy_from_ev,
    temperature,
)
from .errors import (
    AverageOutsideRegion,
    ConfigError,
    DomainError,
    InadmissibleInitialData,
    InversionFailure,
    IrpEulerError,
    MaxStepsExceeded,
    NonhyperbolicState,
    NonphysicalState,
    NoPhysicalRoot,
    StepFailure,
    VacuumFormation,
)
from .limiter import (
    CellPolynomial,
    LimiterOutcome,
    apply_irp_limiter,
    constraint_functions,
    limit_points,
    limiter_distortion,
    theta_for_constraint,
)
from .region import (
    ConservedState,
    HessianMinors,
    InvariantRegion,
    RegionVerdict,
    entropy_total,
    in_invariant_region,
    internal_energy_R,
    membership_mask,
    primitives,
    q_hessian_matrix,
    q_hessian_minors,
    q_value,
)
from .riemann import exact_riemann_polytropic, solve_star_state
from .solver import (
    DiagnosticsSeries,
    FieldState,
    Grid1D,
    RunReport,
    SolverConfig,
    initialize,
    muscl_reconstruct,
    numerical_flux,
    run,
    step,
)
from .verify import fd_hessian
from .cli import cli_main
from .config import RunConfigFile, load_run_config, parse_run_config, serialize_run_config
from .output import read_table, snapshot_table, write_diagnostics, write_snapshot

__version__ = "0.1.0"

__all__ = [
    # eos
    "DimensionlessQuantities", "EosSpec", "PolytropicEos", "PolytropicParams",
    "ReferenceScales", "StabilityReport", "TaitEos", "TaitParams", "ThermoState",
    "check_thermo_stability", "dimensionless_quantities", "entropy_derivatives",
    "generic_entropy_from_ev", "polytropic_F", "polytropic_entropy_from_ev",
    "pressure", "pressure_from_ev", "sound_speed", "tait_F",
    "tait_entropy_from_ev", "temperature",
    # errors
    "AverageOutsideRegion", "ConfigError", "DomainError",
    "InadmissibleInitialData", "InversionFailure", "IrpEulerError",
    "MaxStepsExceeded", "NonhyperbolicState", "NonphysicalState",
    "NoPhysicalRoot", "StepFailure", "VacuumFormation",
    # region
    "ConservedState", "HessianMinors", "InvariantRegion", "RegionVerdict",
    "entropy_total", "in_invariant_region", "internal_energy_R",
    "membership_mask", "primitives",
    "q_hessian_matrix", "q_hessian_minors", "q_value",
    # limiter
    "CellPolynomial", "LimiterOutcome", "apply_irp_limiter",
    "constraint_functions", "limit_points", "limiter_distortion",
    "theta_for_constraint",
    # solver
    "DiagnosticsSeries", "FieldState", "Grid1D", "RunReport", "SolverConfig",
    "initialize", "muscl_reconstruct", "numerical_flux", "run", "step",
    # oracles
    "exact_riemann_polytropic", "solve_star_state", "fd_hessian",
    # app
    "RunConfigFile", "cli_main", "load_run_config", "parse_run_config",
    "serialize_run_config", "read_table", "snapshot_table",
    "write_diagnostics", "write_snapshot",
    # modules
    "config", "output",
]

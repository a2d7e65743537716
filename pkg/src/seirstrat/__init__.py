"""Reinfection-stratified SEIRS dynamics.

A compartmental SEIRS model whose infected-recovered-susceptible cycle is
split into blocks indexed by how many infections an individual has had so
far. The package covers the raw and normalized vector fields (macro, block
stratified, and a two-rate SIS reduction), fixed and adaptive integrators,
the endemic equilibrium with its geometric block profile and Jacobian
spectra, mean reinfection counts, long-run population fate, and recovery of
the SIS rates from incidence-like observations.
"""

from .config import (
    PRESET_NAMES,
    OutputSpec,
    ScenarioConfig,
    parse_config,
    preset_scenario,
    system_columns,
)
from .csvio import format_float, read_table, render_table, write_table
from .equilibrium import (
    EndemicEquilibrium,
    FateClass,
    balance_residual,
    classify_fate,
    closed_form_nu0,
    compute_r0,
    eigenvalues_4x4,
    equilibrium_micro_state,
    jacobian_macro,
    jacobian_micro_block,
    solve_endemic,
)
from .errors import (
    ConfigError,
    DegenerateTrajectoryError,
    DomainError,
    InconsistentInputError,
    NoEndemicEquilibriumError,
    NumericalError,
    UnidentifiableWindowError,
)
from .identification import (
    IdentificationResult,
    ObservedSeries,
    estimate_smooth_derivatives,
    identify_from_equilibrium,
    identify_from_y_only,
    identify_full,
    reconstruct_states,
    sis_endemic_state,
)
from .integrate import (
    RK4_FIXED,
    RK45_ADAPTIVE,
    IntegrationConfig,
    Trajectory,
    integrate,
)
from .model import (
    PER_DAY,
    PER_YEAR,
    SYSTEMS,
    UNIT_FACTOR,
    MacroState,
    MicroState,
    ModelParams,
    SisState,
    make_vector_field,
    rhs_macro,
    rhs_micro,
    rhs_normalized_macro,
    rhs_normalized_micro,
    rhs_sis,
)
from .reinfection_stats import (
    ReinfectionStats,
    stats_analytic,
    stats_closed_form_nu0,
    stats_empirical,
)

__version__ = "0.1.0"

__all__ = [
    "PRESET_NAMES",
    "PER_DAY",
    "PER_YEAR",
    "RK45_ADAPTIVE",
    "RK4_FIXED",
    "SYSTEMS",
    "UNIT_FACTOR",
    "ConfigError",
    "DegenerateTrajectoryError",
    "DomainError",
    "EndemicEquilibrium",
    "FateClass",
    "IdentificationResult",
    "InconsistentInputError",
    "IntegrationConfig",
    "MacroState",
    "MicroState",
    "ModelParams",
    "NoEndemicEquilibriumError",
    "NumericalError",
    "ObservedSeries",
    "OutputSpec",
    "ReinfectionStats",
    "ScenarioConfig",
    "SisState",
    "Trajectory",
    "UnidentifiableWindowError",
    "balance_residual",
    "classify_fate",
    "closed_form_nu0",
    "compute_r0",
    "eigenvalues_4x4",
    "equilibrium_micro_state",
    "estimate_smooth_derivatives",
    "format_float",
    "identify_from_equilibrium",
    "identify_from_y_only",
    "identify_full",
    "integrate",
    "jacobian_macro",
    "jacobian_micro_block",
    "make_vector_field",
    "parse_config",
    "preset_scenario",
    "read_table",
    "reconstruct_states",
    "render_table",
    "rhs_macro",
    "rhs_micro",
    "rhs_normalized_macro",
    "rhs_normalized_micro",
    "rhs_sis",
    "sis_endemic_state",
    "solve_endemic",
    "stats_analytic",
    "stats_closed_form_nu0",
    "stats_empirical",
    "system_columns",
    "write_table",
]

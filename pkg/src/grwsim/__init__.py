"""Spontaneous-localization quantum dynamics on a 1-D periodic grid.

Stochastic collapse trajectories (unitary evolution punctuated by Poisson
localization hits), measurement amplification, three-time correlation
runs on the two-level reduction, a marker-ring irreversibility toy, and
SI unit arithmetic.
"""
from ._version import __version__
from .collapse import (
    GrwParams,
    JumpEvent,
    TrajectoryRecord,
    apply_jump,
    center_density,
    evolve_with_collapse,
    jump_profile,
    sample_center,
    schedule_jumps,
)
from .config import (
    LoadedConfig,
    chain_defaults,
    config_digest,
    load_config,
    render_resolved,
)
from .ensemble import EnsembleSummary, run_ensemble
from .errors import (
    GrwsimError,
    InsufficientDataError,
    NonConvergentError,
    ParseError,
    UnstableStepError,
    ValidationError,
    ZeroNormError,
)
from .kacring import KacRing, equilibration_experiment, kac_step, random_ring
from .propagator import Potential, PropagatorConfig, premeasurement_evolve, step
from .qstate import (
    GridSpec,
    Region,
    WaveFunction,
    gaussian_packet,
    grid_points,
    two_peak_state,
    uniform_state,
)
from .rng import GENERATOR_NAME, RngStream, trajectory_stream
from .scenarios import (
    LgConfig,
    LgResult,
    OutcomeTally,
    ScenarioConfig,
    run_cat,
    run_leggett_garg,
    run_measurement_chain,
    run_single,
    run_wpr_baseline,
    survival_scaling_points,
)
from .stats import born_chi_square, fit_scaling, two_proportion_test
from .units import Scales, amplification_table, default_scales, si_conversion

__all__ = [
    "__version__",
    "GENERATOR_NAME",
    "EnsembleSummary",
    "GridSpec",
    "GrwParams",
    "GrwsimError",
    "InsufficientDataError",
    "JumpEvent",
    "KacRing",
    "LgConfig",
    "LgResult",
    "LoadedConfig",
    "NonConvergentError",
    "OutcomeTally",
    "ParseError",
    "Potential",
    "PropagatorConfig",
    "Region",
    "RngStream",
    "Scales",
    "ScenarioConfig",
    "TrajectoryRecord",
    "UnstableStepError",
    "ValidationError",
    "WaveFunction",
    "ZeroNormError",
    "amplification_table",
    "apply_jump",
    "born_chi_square",
    "center_density",
    "chain_defaults",
    "config_digest",
    "default_scales",
    "equilibration_experiment",
    "evolve_with_collapse",
    "fit_scaling",
    "gaussian_packet",
    "grid_points",
    "jump_profile",
    "kac_step",
    "load_config",
    "premeasurement_evolve",
    "random_ring",
    "render_resolved",
    "run_cat",
    "run_ensemble",
    "run_leggett_garg",
    "run_measurement_chain",
    "run_single",
    "run_wpr_baseline",
    "sample_center",
    "schedule_jumps",
    "si_conversion",
    "step",
    "survival_scaling_points",
    "trajectory_stream",
    "two_peak_state",
    "two_proportion_test",
    "uniform_state",
]

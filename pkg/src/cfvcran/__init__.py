"""Energy-aware planning for multi-operator cell-free massive MIMO over V-CRAN.

The pipeline: generate a deployment (AP grid, users, operator partitions),
estimate downlink channel-hardening statistics by Monte Carlo, turn a spectral
efficiency target into linearized SINR constraint coefficients, assemble a 0-1
integer program for one of two sharing scenarios, and solve it exactly with a
branch-and-bound solver over a bounded-variable simplex.
"""

from .instance import (
    ChannelParams,
    ConfigError,
    Deployment,
    FronthaulParams,
    PowerParams,
    SchemaError,
    SystemConfig,
    generate_deployment,
    load_deployment,
    save_deployment,
)
from .channel import (
    ChannelStatistics,
    ExpectationSet,
    compute_statistics,
    estimate_expectations,
    fractional_power_allocation,
)
from .program import (
    PowerCoefficients,
    SinrProgram,
    build_cbar,
    build_sinr_program,
    compute_big_m,
    gops_load,
    power_coefficients,
    sinr_from_assignment,
    sinr_threshold,
    tpc_of,
)
from .milp import IlpModel, VariableIndex, build_scenario1, build_scenario2
from .solver import SolverOptions, Solution, brute_force, solve, solve_instance, validate

__all__ = [
    "ChannelParams",
    "ChannelStatistics",
    "ConfigError",
    "Deployment",
    "ExpectationSet",
    "FronthaulParams",
    "IlpModel",
    "PowerCoefficients",
    "PowerParams",
    "SchemaError",
    "SinrProgram",
    "Solution",
    "SolverOptions",
    "SystemConfig",
    "VariableIndex",
    "brute_force",
    "build_cbar",
    "build_scenario1",
    "build_scenario2",
    "build_sinr_program",
    "compute_big_m",
    "compute_statistics",
    "estimate_expectations",
    "fractional_power_allocation",
    "generate_deployment",
    "gops_load",
    "load_deployment",
    "power_coefficients",
    "save_deployment",
    "sinr_from_assignment",
    "sinr_threshold",
    "solve",
    "solve_instance",
    "tpc_of",
    "validate",
]

__version__ = "0.1.0"

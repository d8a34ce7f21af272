"""SIS epidemic spreading on sensor networks with probabilistic node sleep scheduling."""

__version__ = "0.1.0"

from .exceptions import ConvergenceError, DegenerateSchedulingError, ValidationError  # noqa: E402
from .params import ModelParams  # noqa: E402
from .graph import (  # noqa: E402
    Graph,
    SpectralResult,
    build_from_edges,
    degree_stats,
    generate_price,
    largest_real_eigenvalue,
    read_edge_list,
    write_edge_list,
)
from .series import Fractions, FractionSeries  # noqa: E402
from .mmc import (  # noqa: E402
    NO_EPIDEMIC,
    epidemic_threshold,
    escape_probability,
    mmc_step,
    run_mmc,
    solve_equilibrium,
    state_fractions,
    stationary_active_fraction,
)
from .montecarlo import AgentPopulation, NodeState, RunConfig, init_population, mc_step, run_ensemble, run_mc  # noqa: E402
from .estimators import MeanFieldSIS, MonteCarloSIS, ThresholdEstimator  # noqa: E402

__all__ = [
    "AgentPopulation", "ConvergenceError", "DegenerateSchedulingError", "FractionSeries", "Fractions",
    "Graph", "MeanFieldSIS", "ModelParams", "MonteCarloSIS", "NO_EPIDEMIC", "NodeState", "RunConfig",
    "SpectralResult", "ThresholdEstimator", "ValidationError", "build_from_edges", "degree_stats",
    "epidemic_threshold", "escape_probability", "generate_price", "init_population",
    "largest_real_eigenvalue", "mc_step", "mmc_step", "read_edge_list", "run_ensemble", "run_mc",
    "run_mmc", "solve_equilibrium", "state_fractions", "stationary_active_fraction", "write_edge_list",
]

"""Agent-based monthly macroeconomic simulator with pluggable household policies."""

__version__ = "0.1.0"

from macroabm.core import (  # noqa: E402
    COVID_SENTENCE,
    AgentState,
    ConfigError,
    EconomyState,
    Intervention,
    MarketParams,
    ParetoParams,
    RngStreams,
    SimConfig,
    TaxSchedule,
    TaylorParams,
    derive_stream,
    init_population,
)
from macroabm.simulation import RunResult, Simulation, SimulationAbort, run_simulation  # noqa: E402

__all__ = [
    "COVID_SENTENCE",
    "AgentState",
    "ConfigError",
    "EconomyState",
    "Intervention",
    "MarketParams",
    "ParetoParams",
    "RngStreams",
    "RunResult",
    "SimConfig",
    "Simulation",
    "SimulationAbort",
    "TaxSchedule",
    "TaylorParams",
    "derive_stream",
    "init_population",
    "run_simulation",
]

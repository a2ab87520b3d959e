"""Trust competition between service nodes: equilibria, dynamics and simulation."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ConfigError,
    GameConfig,
    NodeParams,
    NodeTrajectory,
    Strategy,
    TrustState,
    drift_multi,
    drift_single,
    long_run_average_profit,
    profit_density,
)
from .equilibrium import single_static_optimum, static_best_response, static_nash_fixed_point, verify_nash  # noqa: E402
from .maneuver import InfeasibleTarget, maneuver_general, maneuver_single, maneuver_symmetric  # noqa: E402
from .pontryagin import solve_open_loop, steady_state_open_loop  # noqa: E402
from .abm import simulate_population  # noqa: E402

__all__ = [
    "ConfigError",
    "GameConfig",
    "InfeasibleTarget",
    "NodeParams",
    "NodeTrajectory",
    "Strategy",
    "TrustState",
    "drift_multi",
    "drift_single",
    "long_run_average_profit",
    "maneuver_general",
    "maneuver_single",
    "maneuver_symmetric",
    "profit_density",
    "simulate_population",
    "single_static_optimum",
    "solve_open_loop",
    "static_best_response",
    "static_nash_fixed_point",
    "steady_state_open_loop",
    "verify_nash",
]

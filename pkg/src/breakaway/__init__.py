"""Nonlinear friction with presliding hysteresis and break-away prediction."""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    BreakawayPoint,
    BreakawaySweep,
    SteadyStateChoice,
    breakaway_force,
    breakaway_sweep,
    loop_area_diagnostic,
    phase_diagram,
    presliding_velocity,
)
from .friction import (  # noqa: E402
    FrictionParams,
    PreslidingState,
    advance_state,
    friction_force,
    presliding_shape,
    stribeck,
)
from .identification import FitResult, fit_breakaway_curve, fit_stribeck  # noqa: E402
from .simulation import SimulationConfig, Trajectory, reversal_cycle, run, step  # noqa: E402

__all__ = [
    "BreakawayPoint",
    "BreakawaySweep",
    "FitResult",
    "FrictionParams",
    "PreslidingState",
    "SimulationConfig",
    "SteadyStateChoice",
    "Trajectory",
    "advance_state",
    "breakaway_force",
    "breakaway_sweep",
    "fit_breakaway_curve",
    "fit_stribeck",
    "friction_force",
    "loop_area_diagnostic",
    "phase_diagram",
    "presliding_shape",
    "presliding_velocity",
    "reversal_cycle",
    "run",
    "step",
    "stribeck",
]

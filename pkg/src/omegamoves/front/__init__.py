from .model import FrontConfig, LiftSystem, build_constraints, tangency_class
from .solve import SweepStats, count_solutions, solve_first, sweep_exhaust
from .classify import RealizabilityVerdict, classify_all, classify_move

__all__ = [
    "FrontConfig",
    "LiftSystem",
    "build_constraints",
    "tangency_class",
    "SweepStats",
    "count_solutions",
    "solve_first",
    "sweep_exhaust",
    "RealizabilityVerdict",
    "classify_all",
    "classify_move",
]

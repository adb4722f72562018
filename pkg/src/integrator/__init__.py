__all__ = [
    "HistoryBuffer",
    "HistoryView",
    "IntegrateOptions",
    "StepStats",
    "Trajectory",
    "InitialSegment",
    "integrate",
    "align_step",
    "constant_segment",
    "step_halving_check",
    "history_eval",
    "window_min",
    "window_max",
    "window_minima",
    "rk4_step",
    "etd4_step",
    "phi_functions",
]

from src.integrator.buffer import HistoryBuffer, HistoryView
from src.integrator.options import IntegrateOptions
from src.integrator.schemes import etd4_step, phi_functions, rk4_step
from src.integrator.solver import (
    InitialSegment,
    align_step,
    constant_segment,
    integrate,
    step_halving_check,
)
from src.integrator.trajectory import (
    StepStats,
    Trajectory,
    history_eval,
    window_max,
    window_min,
    window_minima,
)

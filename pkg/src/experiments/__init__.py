__all__ = [
    "ExactSolution",
    "ResidualReport",
    "verify_exact_solution",
    "constant_solution",
    "Ensemble",
    "default_ensemble",
    "ensemble_of",
    "PermanenceEstimate",
    "estimate_permanence",
    "run_ensemble",
    "ExtinctionResult",
    "extinction_check",
    "floor_consistency",
    "ComparisonResult",
    "comparison_check",
    "minima_nondecreasing",
    "DecayFit",
    "decay_rate_fit",
]

from src.experiments.comparison import ComparisonResult, comparison_check, minima_nondecreasing
from src.experiments.exact import ExactSolution, ResidualReport, constant_solution, verify_exact_solution
from src.experiments.permanence import (
    Ensemble,
    ExtinctionResult,
    PermanenceEstimate,
    default_ensemble,
    ensemble_of,
    estimate_permanence,
    extinction_check,
    floor_consistency,
    run_ensemble,
)
from src.experiments.stability import DecayFit, decay_rate_fit

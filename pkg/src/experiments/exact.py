from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.config import settings
from src.errors import ModelConstraintError
from src.logger import logger as log
from src.system.history import FunctionHistory
from src.system.spec import SystemSpec, rhs_eval
from src.timefn import CoefficientFn, const, derivative, evaluate
from src.timefn.coefficient import central_difference


@dataclass(frozen=True)
class ExactSolution:
    """Closed-form solution, one function of absolute time per component."""

    components: tuple[CoefficientFn, ...]
    valid_from: float

    def history(self) -> FunctionHistory:
        return FunctionHistory(self.components, self.valid_from)

    def values(self, t: float) -> np.ndarray:
        return np.array([float(evaluate(fn, t, check_domain=False)) for fn in self.components])


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    at_time: float
    # "analytic" or "central-difference"
    method: str
    grid: dict

    def passes(self, tolerance: float | None = None) -> bool:
        tolerance = settings.experiments.residual_tolerance if tolerance is None else tolerance
        return self.max_residual <= tolerance

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "at_time": self.at_time,
            "method": self.method,
            "grid": dict(self.grid),
        }


def _slopes(fn: CoefficientFn, times: np.ndarray) -> tuple[np.ndarray, bool]:
    exact = derivative(fn, times)
    if exact is not None:
        return np.asarray(exact, dtype=float), True
    return np.array([central_difference(fn, float(t)) for t in times]), False


def verify_exact_solution(
    sys: SystemSpec,
    sol: ExactSolution,
    t1: float | None = None,
    t2: float = 100.0,
    points: int | None = None,
) -> ResidualReport:
    """
    max over the grid of |sol'(t) - rhs(t, sol)|_inf.

    The default window starts at max(1, domain_start).
    """
    if len(sol.components) != sys.n:
        raise ModelConstraintError(f"solution has {len(sol.components)} components, system has {sys.n}")
    t1 = max(1.0, sys.domain_start) if t1 is None else t1
    points = settings.experiments.residual_points if points is None else points
    if t1 - sys.tau < sol.valid_from - 1e-12:
        raise ModelConstraintError(
            f"solution is valid from {sol.valid_from:.6g}, the check needs history from {t1 - sys.tau:.6g}"
        )
    times = np.linspace(t1, t2, points)
    hist = sol.history()

    slopes = []
    analytic = True
    for fn in sol.components:
        values, exact = _slopes(fn, times)
        slopes.append(values)
        analytic = analytic and exact
    slopes = np.column_stack(slopes)

    residuals = np.empty(len(times))
    for k, t in enumerate(times):
        residuals[k] = float(np.max(np.abs(slopes[k] - rhs_eval(sys, float(t), hist))))
    worst = int(np.argmax(residuals))
    method = "analytic" if analytic else "central-difference"
    report = ResidualReport(
        float(residuals[worst]),
        float(times[worst]),
        method,
        {"t1": float(t1), "t2": float(t2), "points": int(points)},
    )
    log.info("Exact solution residual", extra={"system": sys.name, **report.to_dict()})
    return report


def constant_solution(values: Sequence[float], valid_from: float = 0.0) -> ExactSolution:
    return ExactSolution(tuple(const(float(v)) for v in values), valid_from)

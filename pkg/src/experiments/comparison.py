from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.integrator import InitialSegment, IntegrateOptions, integrate, window_minima
from src.logger import logger as log
from src.system.spec import SystemSpec
from src.system.transforms import build_cooperative_lower


@dataclass(frozen=True)
class ComparisonResult:
    # max over the grid and components of x_lower - x_full
    max_violation: float
    at_time: float
    component: int
    # s_k of the lower solution, one per tau-window
    minima: tuple[float, ...]
    minima_monotone: bool

    def to_dict(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "at_time": self.at_time,
            "component": self.component + 1,
            "window_minima": list(self.minima),
            "window_minima_monotone": self.minima_monotone,
        }


def minima_nondecreasing(s: np.ndarray, m: float, tol: float = 1e-9) -> bool:
    """s_k does not decrease before it first exceeds m."""
    for k in range(1, len(s)):
        if s[k - 1] >= m:
            return True
        if s[k] < s[k - 1] - tol * max(1.0, abs(s[k - 1])):
            return False
    return True


def comparison_check(
    sys: SystemSpec,
    m: float,
    M: float,
    phi0: InitialSegment,
    horizon: float,
    opts: IntegrateOptions | None = None,
) -> ComparisonResult:
    """
    Integrate the system and its cooperative lower system from the same
    segment; the lower solution must stay below the full one.
    """
    opts = opts or IntegrateOptions.from_settings()
    lower_sys = build_cooperative_lower(sys, m, M)
    full = integrate(sys, phi0, horizon, opts)
    lower = integrate(lower_sys, phi0, horizon, opts)

    times = full.output_grid()
    gap = lower.sample(times) - full.sample(times)
    k, i = np.unravel_index(int(np.argmax(gap)), gap.shape)

    minima = np.empty(0)
    if sys.tau > 0:
        count = int((horizon - full.t0) // sys.tau)
        minima = window_minima(lower, full.t0, sys.tau, count)
    result = ComparisonResult(
        float(gap[k, i]),
        float(times[k]),
        int(i),
        tuple(float(x) for x in minima),
        minima_nondecreasing(minima, m),
    )
    log.info(
        "Comparison check finished",
        extra={"system": sys.name, "m": m, "M": M, "max_violation": result.max_violation},
    )
    return result

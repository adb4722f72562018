from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from src.config import settings
from src.integrator import Trajectory
from src.logger import logger as log


@dataclass(frozen=True)
class DecayFit:
    # -slope of log |x(t)|_inf; inf when the norm underflows
    rate: float
    r_squared: float
    window: tuple[float, float]
    underflow: bool = False

    def to_dict(self) -> dict:
        return {
            "rate": self.rate if math.isfinite(self.rate) else "inf",
            "r_squared": self.r_squared,
            "window": list(self.window),
            "underflow": self.underflow,
        }


def decay_rate_fit(traj: Trajectory, window: tuple[float, float], points: int | None = None) -> DecayFit:
    """Least-squares exponential rate of the sup-norm on the window."""
    t1, t2 = window
    if not t1 < t2:
        raise ValueError(f"empty window [{t1}, {t2}]")
    points = settings.experiments.fit_points if points is None else points
    times = np.linspace(t1, t2, points)
    norms = np.max(np.abs(traj.sample(times)), axis=1)

    if np.any(norms <= np.finfo(float).tiny):
        log.info("Norm underflow, decay confirmed", extra={"window": [t1, t2]})
        return DecayFit(math.inf, 1.0, (t1, t2), underflow=True)

    logs = np.log(norms)
    slope, intercept = np.polyfit(times, logs, 1)
    fitted = slope * times + intercept
    total = float(np.sum((logs - logs.mean()) ** 2))
    r_squared = 1.0 - float(np.sum((logs - fitted) ** 2)) / total if total > 0 else 1.0
    return DecayFit(float(-slope), r_squared, (t1, t2))

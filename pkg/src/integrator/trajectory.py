from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from src.errors import HistoryGapError
from src.integrator.buffer import HistoryBuffer
from src.system.history import History, Integrand


@dataclass(frozen=True)
class StepStats:
    steps: int
    rhs_calls: int
    step: float
    scheme: str
    aligned: bool


class Trajectory(History):
    """Dense output of one integration, read-only once returned."""

    def __init__(self, buffer: HistoryBuffer, t0: float, t_end: float, stats: StepStats, name: str = ""):
        self._buffer = buffer
        self.n = buffer.n
        self.t0 = float(t0)
        self.t_end = float(t_end)
        self.stats = stats
        self.name = name

    @property
    def span(self) -> tuple[float, float]:
        return self._buffer.t_first, self._buffer.t_last

    @property
    def knots(self) -> np.ndarray:
        return self._buffer.times[: self._buffer.last + 1]

    @property
    def states(self) -> np.ndarray:
        return self._buffer.y[: self._buffer.last + 1]

    def _inside(self, t: float) -> None:
        lo, hi = self.span
        tol = 1e-9 * self._buffer.h + 1e-13 * abs(t)
        if t < lo - tol or t > hi + tol:
            raise HistoryGapError(f"t={t:.6g} is outside the trajectory span [{lo:.6g}, {hi:.6g}]")

    def value(self, component: int, t: float) -> float:
        self._inside(t)
        return self._buffer.value(component, t)

    def integral(self, component: int, start: float, end: float, integrand: Integrand) -> float:
        self._inside(start)
        self._inside(end)
        return self._buffer.integral(component, start, end, integrand)

    def window_min(self, component: int, start: float, end: float) -> float:
        self._inside(start)
        self._inside(end)
        return self._buffer.window_min(component, start, end)

    def window_max(self, component: int, start: float, end: float) -> float:
        self._inside(start)
        self._inside(end)
        return self._buffer.window_max(component, start, end)

    def at(self, t: float) -> np.ndarray:
        self._inside(t)
        return self._buffer.state(t)

    def sample(self, times: Sequence[float] | np.ndarray) -> np.ndarray:
        """States on the given times, shape (len(times), n)."""
        times = np.asarray(times, dtype=float)
        if times.size:
            self._inside(float(times.min()))
            self._inside(float(times.max()))
        return np.column_stack([self._buffer.interpolate(i, times) for i in range(self.n)])

    def output_grid(self, step: float | None = None) -> np.ndarray:
        """Uniform grid t0, t0 + step, ..., t_end (the integration step by default)."""
        step = step or self.stats.step
        count = int(round((self.t_end - self.t0) / step))
        grid = self.t0 + step * np.arange(count + 1)
        return np.minimum(grid, self.span[1])

    def to_frame(self, times: Sequence[float] | np.ndarray | None = None) -> pd.DataFrame:
        times = self.output_grid() if times is None else np.asarray(times, dtype=float)
        data = {"t": times}
        values = self.sample(times)
        for i in range(self.n):
            data[f"x{i + 1}"] = values[:, i]
        return pd.DataFrame(data)

    def to_csv(self, path: str | Path, times: Sequence[float] | np.ndarray | None = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame(times).to_csv(path, index=False, float_format="%.17g")
        return path


def history_eval(traj: History, t: float) -> np.ndarray:
    """Interpolated state at t."""
    if isinstance(traj, Trajectory):
        return traj.at(t)
    if isinstance(traj, HistoryBuffer):
        return traj.state(t)
    return traj.values(t)


def window_min(traj: History, component: int, window: tuple[float, float]) -> float:
    return traj.window_min(component, window[0], window[1])


def window_max(traj: History, component: int, window: tuple[float, float]) -> float:
    return traj.window_max(component, window[0], window[1])


def window_minima(traj: History, t_start: float, tau: float, count: int) -> np.ndarray:
    """s_k = min over components of the minimum on [t_start + k tau, t_start + (k + 1) tau]."""
    out = np.empty(count)
    for k in range(count):
        lo = t_start + k * tau
        out[k] = min(traj.window_min(i, lo, lo + tau) for i in range(traj.n))
    return out

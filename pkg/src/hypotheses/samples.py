from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from src.config import settings
from src.errors import EnvelopeError
from src.system.spec import SystemSpec
from src.timefn import evaluate


@dataclass(frozen=True)
class MatrixSamples:
    """D(t_k), A(t_k), B(t_k) on a geometric grid of [t_check, t_max]."""

    times: np.ndarray
    D: np.ndarray
    A: np.ndarray
    B: np.ndarray
    # raw envelope coefficients beta_i(t_k) before the gain normalization
    beta: np.ndarray
    gains: tuple[float, ...]
    grid: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.D.shape[1]

    @property
    def M(self) -> np.ndarray:
        return self.B + self.A - self.D

    def same_grid(self, other: MatrixSamples) -> bool:
        return bool(np.array_equal(self.times, other.times))


def grid_times(t_check: float, t_max: float, points: int) -> np.ndarray:
    if not t_check < t_max:
        raise ValueError(f"need t_check < t_max, got [{t_check}, {t_max}]")
    if points < 2:
        raise ValueError("a grid needs at least two points")
    if t_check > 0:
        return np.geomspace(t_check, t_max, points)
    return np.linspace(t_check, t_max, points)


def _gain(f) -> float:
    try:
        return f.lower_shape().gain()
    except EnvelopeError:
        shapes = f.shapes()
        return min(shape.gain() for shape in shapes) if shapes else 0.0


def sample_matrices(
    sys: SystemSpec,
    t_check: float | None = None,
    t_max: float | None = None,
    points: int | None = None,
) -> MatrixSamples:
    """
    Sample D (decay), A (operator norms a_ij) and B (envelope coefficients,
    rescaled so that h-'(0+) = 1 when the gain is positive and finite).
    """
    cfg = settings.grid
    t_check = cfg.t_check if t_check is None else t_check
    t_max = cfg.t_max if t_max is None else t_max
    points = cfg.points if points is None else points
    t_check = max(t_check, sys.domain_start)
    times = grid_times(t_check, t_max, points)
    n, K = sys.n, len(times)

    D = np.zeros((K, n, n))
    A = np.zeros((K, n, n))
    B = np.zeros((K, n, n))
    beta = np.zeros((K, n))
    gains: list[float] = []
    for i in range(n):
        D[:, i, i] = evaluate(sys.decay[i], times)
        for j in range(n):
            a = sys.coupling(i, j)
            if a is not None:
                A[:, i, j] = evaluate(a, times)
        f = sys.birth[i]
        if f is None:
            gains.append(0.0)
            continue
        gain = _gain(f)
        gains.append(gain)
        beta[:, i] = evaluate(f.beta(), times)
        B[:, i, i] = beta[:, i] * gain if 0 < gain < math.inf else beta[:, i]

    grid = {
        "t_check": float(t_check),
        "t_max": float(t_max),
        "points": int(points),
        "spacing": "geometric" if t_check > 0 else "uniform",
    }
    return MatrixSamples(times, D, A, B, beta, tuple(gains), grid)


def refine(sys: SystemSpec, grid: dict, factor: int) -> MatrixSamples:
    """The same window sampled factor times finer."""
    return sample_matrices(sys, grid["t_check"], grid["t_max"], (grid["points"] - 1) * factor + 1)

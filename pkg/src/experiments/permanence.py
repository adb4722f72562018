"""
Empirical permanence / extinction studies over ensembles of initial segments.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from src.config import settings
from src.errors import IntegrationError, NegativeHistoryError
from src.integrator import IntegrateOptions, InitialSegment, Trajectory, constant_segment, integrate
from src.logger import logger as log
from src.system.spec import SystemSpec


@dataclass(frozen=True)
class Ensemble:
    segments: tuple[tuple, ...]
    seed: int | None
    # constant value of each member, shape (size, n); None for hand-built ensembles
    values: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.segments)


def default_ensemble(
    n: int,
    size: int | None = None,
    seed: int | None = None,
    low: float | None = None,
    high: float | None = None,
) -> Ensemble:
    """Constant segments with log-uniform values in [low, high] plus the constant 1 segment."""
    cfg = settings.ensemble
    size = cfg.size if size is None else size
    seed = cfg.seed if seed is None else seed
    low = cfg.low if low is None else low
    high = cfg.high if high is None else high
    if size < 1:
        raise ValueError("ensemble size must be at least 1")
    if not 0 < low < high:
        raise ValueError(f"need 0 < low < high, got [{low}, {high}]")

    rng = np.random.default_rng(seed)
    drawn = np.exp(rng.uniform(math.log(low), math.log(high), size=(size - 1, n)))
    values = np.vstack([np.ones((1, n)), drawn])
    segments = tuple(tuple(constant_segment(row)) for row in values)
    return Ensemble(segments, seed, values)


def ensemble_of(segments: Sequence[InitialSegment], seed: int | None = None) -> Ensemble:
    return Ensemble(tuple(tuple(s) for s in segments), seed)


@dataclass(frozen=True)
class MemberStats:
    index: int
    minimum: np.ndarray
    maximum: np.ndarray
    early_min: np.ndarray
    late_min: np.ndarray
    final: np.ndarray


@dataclass(frozen=True)
class PermanenceEstimate:
    m_hat: tuple[float, ...]
    M_hat: tuple[float, ...]
    transient_time: float
    ensemble_size: int
    horizon: float
    seed: int | None
    lower_bound_positive: bool
    # (member index, error message)
    failures: tuple[tuple[int, str], ...] = ()
    drift: tuple[float, ...] = field(default_factory=tuple)

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    @property
    def m_min(self) -> float:
        return min(self.m_hat) if self.m_hat else math.nan

    @property
    def M_max(self) -> float:
        return max(self.M_hat) if self.M_hat else math.nan

    def to_dict(self) -> dict:
        return {
            "m_hat": list(self.m_hat),
            "M_hat": list(self.M_hat),
            "m_min": self.m_min,
            "M_max": self.M_max,
            "transient_time": self.transient_time,
            "ensemble_size": self.ensemble_size,
            "horizon": self.horizon,
            "seed": self.seed,
            "lower_bound_positive": self.lower_bound_positive,
            "partial": self.partial,
            "failures": [{"member": i, "error": msg} for i, msg in self.failures],
            "drift": list(self.drift),
        }


def _member_stats(index: int, traj: Trajectory, transient: float, horizon: float) -> MemberStats:
    mid = 0.5 * (transient + horizon)
    n = traj.n
    return MemberStats(
        index,
        np.array([traj.window_min(i, transient, horizon) for i in range(n)]),
        np.array([traj.window_max(i, transient, horizon) for i in range(n)]),
        np.array([traj.window_min(i, transient, mid) for i in range(n)]),
        np.array([traj.window_min(i, mid, horizon) for i in range(n)]),
        traj.at(horizon),
    )


def run_ensemble(
    sys: SystemSpec,
    ensemble: Ensemble,
    horizon: float,
    opts: IntegrateOptions | None = None,
    max_workers: int | None = None,
    task: Callable[[int, Trajectory], object] | None = None,
) -> tuple[dict[int, object], list[tuple[int, str]]]:
    """Integrate every member on a thread pool; results keyed by member index, reduced by task if given."""
    opts = opts or IntegrateOptions.from_settings()
    max_workers = settings.ensemble.max_workers if max_workers is None else max_workers

    def job(index: int, segment):
        traj = integrate(sys, list(segment), horizon, opts)
        if task is None:
            return traj
        return task(index, traj)

    results: dict[int, object] = {}
    failures: list[tuple[int, str]] = []
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as ex:
        futures = {ex.submit(job, i, seg): i for i, seg in enumerate(ensemble.segments)}
        for fut in as_completed(futures):
            index = futures[fut]
            try:
                results[index] = fut.result()
            except (IntegrationError, NegativeHistoryError) as exc:
                log.warning("Ensemble member failed", extra={"member": index, "error": str(exc)})
                failures.append((index, str(exc)))
    failures.sort()
    return results, failures


def estimate_permanence(
    sys: SystemSpec,
    ensemble: Ensemble,
    horizon: float | None = None,
    transient_fraction: float | None = None,
    opts: IntegrateOptions | None = None,
    max_workers: int | None = None,
) -> PermanenceEstimate:
    """
    Post-transient window statistics over the ensemble.

    The lower bound counts as positive only if m_hat > 0, every member
    integrated, and the late half of the window does not drift below the
    early half by more than the drift tolerance.
    """
    if len(ensemble) == 0:
        raise ValueError("ensemble is empty")
    cfg = settings.ensemble
    horizon = settings.experiments.horizon if horizon is None else horizon
    fraction = cfg.transient_fraction if transient_fraction is None else transient_fraction
    if not 0 <= fraction < 1:
        raise ValueError(f"transient fraction must lie in [0, 1), got {fraction}")
    t0 = sys.domain_start
    transient = t0 + fraction * (horizon - t0)

    log.info(
        "Permanence estimate started",
        extra={"system": sys.name, "members": len(ensemble), "horizon": horizon, "seed": ensemble.seed},
    )
    results, failures = run_ensemble(
        sys,
        ensemble,
        horizon,
        opts,
        max_workers,
        task=lambda i, traj: _member_stats(i, traj, transient, horizon),
    )
    # reduction in member order
    stats = [results[i] for i in sorted(results)]
    if not stats:
        m_hat = (0.0,) * sys.n
        M_hat = (math.nan,) * sys.n
        drift = ()
        positive = False
    else:
        minima = np.min([s.minimum for s in stats], axis=0)
        maxima = np.max([s.maximum for s in stats], axis=0)
        early = np.min([s.early_min for s in stats], axis=0)
        late = np.min([s.late_min for s in stats], axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(early > 0, late / early, 0.0)
        m_hat = tuple(float(x) for x in minima)
        M_hat = tuple(float(x) for x in maxima)
        drift = tuple(float(x) for x in ratio)
        positive = bool(np.all(minima > 0) and np.all(ratio >= 1.0 - cfg.drift_tolerance) and not failures)

    if failures:
        log.warning("Permanence estimate is partial", extra={"failed": len(failures), "members": len(ensemble)})
    estimate = PermanenceEstimate(
        m_hat, M_hat, float(transient), len(ensemble), float(horizon), ensemble.seed, positive, tuple(failures), drift
    )
    log.info("Permanence estimate finished", extra={"system": sys.name, **estimate.to_dict()})
    return estimate


@dataclass(frozen=True)
class ExtinctionResult:
    extinct: bool
    # sup-norm over the last window before H and before 2H, per member
    first: tuple[float, ...]
    second: tuple[float, ...]
    horizon: float

    def to_dict(self) -> dict:
        return {
            "extinct": self.extinct,
            "first_window_sup": list(self.first),
            "second_window_sup": list(self.second),
            "horizon": self.horizon,
        }


def _window_sup(traj: Trajectory, start: float, end: float) -> float:
    return max(abs(traj.window_max(i, start, end)) for i in range(traj.n))


def extinction_check(
    sys: SystemSpec,
    ensemble: Ensemble,
    horizon: float | None = None,
    opts: IntegrateOptions | None = None,
    max_workers: int | None = None,
) -> ExtinctionResult:
    """
    Extinction is confirmed when, for every member, the sup-norm over the
    final window at 2H is at most half of the one at H.
    """
    if len(ensemble) == 0:
        raise ValueError("ensemble is empty")
    horizon = settings.experiments.horizon if horizon is None else horizon
    width = min(settings.experiments.extinction_window, 0.5 * (horizon - sys.domain_start))
    end = sys.domain_start + 2.0 * (horizon - sys.domain_start)

    def task(index: int, traj: Trajectory) -> tuple[float, float]:
        return _window_sup(traj, horizon - width, horizon), _window_sup(traj, end - width, end)

    results, failures = run_ensemble(sys, ensemble, end, opts, max_workers, task=task)
    if failures:
        raise IntegrationError(f"{len(failures)} ensemble members failed, first: {failures[0][1]}")
    pairs = [results[i] for i in sorted(results)]
    first = tuple(p[0] for p in pairs)
    second = tuple(p[1] for p in pairs)
    extinct = all(b == 0.0 or b <= 0.5 * a for a, b in pairs)
    log.info("Extinction check finished", extra={"system": sys.name, "extinct": extinct, "horizon": horizon})
    return ExtinctionResult(extinct, first, second, float(horizon))


def floor_consistency(estimate: PermanenceEstimate, v: Sequence[float], factor: float = 10.0) -> bool:
    """m_hat_i >= kappa v_i with one kappa > 0: the ratios m_hat_i / v_i agree within factor."""
    v = np.asarray(v, dtype=float)
    m = np.asarray(estimate.m_hat, dtype=float)
    if m.shape != v.shape or np.any(v <= 0):
        raise ValueError("floor vector must be positive with one entry per component")
    if not np.all(m > 0):
        return False
    kappa = m / v
    return bool(kappa.max() / kappa.min() <= factor)

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from src.config import Scheme
from src.errors import IntegrationError, MaxStepsExceeded, ModelConstraintError, PositivityError, StepBoundError
from src.integrator.buffer import HistoryBuffer, HistoryView
from src.integrator.options import IntegrateOptions
from src.integrator.schemes import etd4_step, rk4_step
from src.integrator.trajectory import StepStats, Trajectory
from src.logger import logger as log
from src.system.spec import SystemSpec, rhs_eval
from src.timefn import CoefficientFn, const, evaluate

InitialSegment = Sequence[CoefficientFn]


def constant_segment(values: Sequence[float]) -> list[CoefficientFn]:
    return [const(float(v)) for v in values]


def align_step(h: float, lags: Sequence[float], max_refine: int = 1000) -> float:
    """
    Largest h' <= h dividing every positive constant lag, so that the
    breakpoints t0 + k * lag fall on knots. Returns h if the lags are incommensurate.
    """
    positive = sorted({float(lag) for lag in lags if lag > 0})
    if not positive:
        return h
    shortest = positive[0]
    first = max(1, math.ceil(shortest / h - 1e-9))
    for m in range(first, first * max_refine + 1):
        candidate = shortest / m
        ratios = [lag / candidate for lag in positive]
        if all(abs(r - round(r)) <= 1e-9 * r for r in ratios):
            return candidate
    log.warning("Constant lags are incommensurate, breakpoints stay unaligned", extra={"lags": positive})
    return h


def _check_initial(phi0: InitialSegment, knots: np.ndarray, floor: float | None) -> None:
    if floor is None:
        return
    for i, fn in enumerate(phi0):
        values = np.asarray(evaluate(fn, knots, check_domain=False))
        if np.any(values < 0):
            raise ModelConstraintError(f"initial segment of x{i + 1} takes negative values")
        if values[-1] <= 0:
            raise ModelConstraintError(f"initial value x{i + 1}(t0) must be positive")


def integrate(
    sys: SystemSpec,
    phi0: InitialSegment,
    t_end: float,
    opts: IntegrateOptions | None = None,
    t0: float | None = None,
) -> Trajectory:
    """
    Method of steps with a fixed step and cubic Hermite dense output.

    Every stage reads history from committed segments, plus the linear stage
    tail inside the current step.

    :raises StepBoundError: h is not in (0, tau/4]
    :raises MaxStepsExceeded: the horizon needs more than opts.max_steps steps
    :raises PositivityError: a component crossed the positivity floor
    """
    opts = opts or IntegrateOptions.from_settings()
    t0 = sys.domain_start if t0 is None else float(t0)
    if t_end <= t0:
        raise ValueError(f"t_end={t_end} must exceed the initial time {t0}")
    if len(phi0) != sys.n:
        raise ModelConstraintError(f"initial segment needs {sys.n} components, got {len(phi0)}")

    h = opts.step
    if sys.tau > 0 and h > sys.tau / 4.0 * (1 + 1e-12):
        raise StepBoundError(f"step {h:.6g} exceeds tau/4 = {sys.tau / 4.0:.6g}")

    aligned = False
    if opts.track_breakpoints:
        lags = sys.constant_lags()
        if lags:
            new_h = align_step(h, lags)
            aligned = new_h != h
            if aligned:
                log.info("Step aligned to the constant lags", extra={"requested": h, "step": new_h})
            h = new_h

    lead = math.ceil(sys.tau / h - 1e-9) if sys.tau > 0 else 0
    steps = math.ceil((t_end - t0) / h - 1e-9)
    if steps > opts.max_steps:
        raise MaxStepsExceeded(f"{steps} steps of {h:.6g} needed, limit is {opts.max_steps}")

    buf = HistoryBuffer(sys.n, t0, h, lead, lead + steps + 1, opts.gauss_nodes)
    _check_initial(phi0, buf.times[: lead + 1], opts.positivity_floor)
    buf.fill_initial(phi0)

    calls = 0

    def stage_rhs(t: float, y: np.ndarray) -> np.ndarray:
        nonlocal calls
        calls += 1
        return rhs_eval(sys, t, HistoryView(buf, t, y))

    def decay_at(t: float) -> np.ndarray:
        return np.array([float(evaluate(d, t)) for d in sys.decay])

    log.info(
        "Integration started",
        extra={"system": sys.name, "n": sys.n, "t0": t0, "t_end": t_end, "step": h, "scheme": opts.scheme.value},
    )
    floor = opts.positivity_floor
    y = buf.y[lead].copy()
    t = t0
    f_n = stage_rhs(t, y)
    for k in range(steps):
        if opts.scheme is Scheme.ETD4:
            y_new = etd4_step(t, y, h, f_n, stage_rhs, decay_at(t + 0.5 * h))
        else:
            y_new = rk4_step(t, y, h, f_n, stage_rhs)
        t_new = t0 + (k + 1) * h
        if not np.all(np.isfinite(y_new)):
            raise IntegrationError(f"state became non-finite at t={t_new:.6g}")
        if floor is not None and np.any(y_new < floor):
            i = int(np.argmin(y_new - floor))
            raise PositivityError(t_new, i, float(y_new[i]))
        f_new = stage_rhs(t_new, y_new)
        buf.commit(y_new, f_n, f_new)
        y, f_n, t = y_new, f_new, t_new

    log.info("Integration finished", extra={"system": sys.name, "steps": steps, "rhs_calls": calls})
    stats = StepStats(steps, calls, h, opts.scheme.value, aligned)
    return Trajectory(buf, t0, t_end, stats, sys.name)


def step_halving_check(
    sys: SystemSpec,
    phi0: InitialSegment,
    t_end: float,
    opts: IntegrateOptions | None = None,
) -> float:
    """Largest knot discrepancy between runs with step h and h/2."""
    opts = opts or IntegrateOptions.from_settings()
    coarse = integrate(sys, phi0, t_end, opts)
    fine = integrate(sys, phi0, t_end, opts.halved())
    times = coarse.knots[coarse.knots >= coarse.t0]
    times = times[times <= fine.span[1]]
    return float(np.max(np.abs(coarse.sample(times) - fine.sample(times))))

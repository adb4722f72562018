"""Normalized delay measures nu(t, .) on [-tau, 0]."""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np
from scipy.integrate import quad

from src.config import settings
from src.errors import ModelConstraintError
from src.system.history import History, Integrand
from src.timefn import CoefficientFn, as_fn, evaluate


def _identity(s: np.ndarray, x: np.ndarray) -> np.ndarray:
    return x


@dataclass(frozen=True)
class InstantPoint:
    kind: ClassVar[str] = "instant"

    def integrate(self, t: float, hist: History, component: int, integrand: Integrand = _identity) -> float:
        x = hist.value(component, t)
        return float(integrand(np.asarray([t]), np.asarray([x]))[0])

    def max_lag(self, times: np.ndarray) -> float:
        return 0.0

    def constant_lags(self) -> list[float] | None:
        return []

    @property
    def is_instant(self) -> bool:
        return True


@dataclass(frozen=True)
class LagPoint:
    lag: CoefficientFn
    kind: ClassVar[str] = "lag"

    def integrate(self, t: float, hist: History, component: int, integrand: Integrand = _identity) -> float:
        s = t - float(evaluate(self.lag, t))
        x = hist.value(component, s)
        return float(integrand(np.asarray([s]), np.asarray([x]))[0])

    def max_lag(self, times: np.ndarray) -> float:
        return float(np.max(evaluate(self.lag, times)))

    def constant_lags(self) -> list[float] | None:
        if not self.lag.is_constant:
            return None
        return [float(evaluate(self.lag, self.lag.domain_start))]

    @property
    def is_instant(self) -> bool:
        return self.lag.is_constant and float(evaluate(self.lag, self.lag.domain_start)) == 0.0


@dataclass(frozen=True)
class Density:
    """Density k(theta) of the lag theta >= 0, supported on [0, support(t)]."""

    density: CoefficientFn
    support: CoefficientFn
    kind: ClassVar[str] = "density"

    def __post_init__(self):
        cfg = settings.envelope
        times = np.linspace(cfg.kernel_check_start, cfg.kernel_check_stop, cfg.kernel_check_points)
        for t in times:
            width = float(evaluate(self.support, max(t, self.support.domain_start)))
            if width <= 0:
                raise ModelConstraintError(f"density support must be positive, got {width:.6g}")
            mass, _ = quad(
                lambda th: float(evaluate(self.density, th, check_domain=False)),
                0.0,
                width,
                epsabs=1e-14,
                epsrel=1e-13,
                limit=200,
            )
            if abs(mass - 1.0) > cfg.kernel_mass_tol:
                raise ModelConstraintError(
                    f"density kernel has mass {mass:.12g} on [0, {width:.6g}], expected 1"
                )

    def integrate(self, t: float, hist: History, component: int, integrand: Integrand = _identity) -> float:
        width = float(evaluate(self.support, t))

        def weighted(s: np.ndarray, x: np.ndarray) -> np.ndarray:
            return np.asarray(evaluate(self.density, t - s, check_domain=False)) * integrand(s, x)

        return hist.integral(component, t - width, t, weighted)

    def max_lag(self, times: np.ndarray) -> float:
        return float(np.max(evaluate(self.support, times)))

    def constant_lags(self) -> list[float] | None:
        if not self.support.is_constant:
            return None
        return [float(evaluate(self.support, self.support.domain_start))]

    @property
    def is_instant(self) -> bool:
        return False


@dataclass(frozen=True)
class UniformDensity:
    """Uniform probability density on [-width(t), 0]."""

    width: CoefficientFn
    kind: ClassVar[str] = "uniform"

    def integrate(self, t: float, hist: History, component: int, integrand: Integrand = _identity) -> float:
        width = float(evaluate(self.width, t))
        if width <= 0:
            return InstantPoint().integrate(t, hist, component, integrand)
        return hist.integral(component, t - width, t, integrand) / width

    def max_lag(self, times: np.ndarray) -> float:
        return float(np.max(evaluate(self.width, times)))

    def constant_lags(self) -> list[float] | None:
        if not self.width.is_constant:
            return None
        return [float(evaluate(self.width, self.width.domain_start))]

    @property
    def is_instant(self) -> bool:
        return False


DelayKernel = Union[InstantPoint, LagPoint, Density, UniformDensity]


def lag_point(lag: CoefficientFn | float) -> LagPoint:
    return LagPoint(as_fn(lag))


def uniform(width: CoefficientFn | float) -> UniformDensity:
    return UniformDensity(as_fn(width))


def kernel_mass(kernel: DelayKernel, t: float) -> float:
    """Quadrature of the kernel alone at time t (1 for every valid kernel)."""
    if isinstance(kernel, (InstantPoint, LagPoint)):
        return 1.0
    if isinstance(kernel, UniformDensity):
        width = float(evaluate(kernel.width, t))
        if width <= 0:
            return 1.0
        mass, _ = quad(lambda s: 1.0 / width, -width, 0.0)
        return float(mass)
    width = float(evaluate(kernel.support, t))
    mass, _ = quad(
        lambda th: float(evaluate(kernel.density, th, check_domain=False)),
        0.0,
        width,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=200,
    )
    return float(mass)

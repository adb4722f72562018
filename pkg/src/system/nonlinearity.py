"""Birth terms f_i(t, x_i,t)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, ClassVar, Literal, Union

import numpy as np

from src.errors import EnvelopeError, ModelConstraintError, NegativeHistoryError
from src.system.history import History
from src.system.kernels import DelayKernel, InstantPoint
from src.system.shapes import Shape, lower_of
from src.timefn import CoefficientFn, evaluate, lag_integral


def _nonnegative(x: np.ndarray, t: float, component: int) -> np.ndarray:
    if np.any(x < 0):
        raise NegativeHistoryError(
            f"birth term of x{component + 1} saw a negative history value "
            f"{float(np.min(x)):.6g} at t={t:.6g}"
        )
    return x


@dataclass(frozen=True)
class BirthTerm:
    """coef(t) * integral of shape(t, x(t+s)) d nu(s)"""

    coef: CoefficientFn
    shape: Shape
    kernel: DelayKernel = field(default_factory=InstantPoint)


@dataclass(frozen=True)
class KernelBirth:
    terms: tuple[BirthTerm, ...]
    kind: ClassVar[str] = "kernel_birth"

    def evaluate(self, t: float, hist: History, component: int) -> float:
        total = 0.0
        for term in self.terms:

            def integrand(s, x, shape=term.shape):
                return shape.value(t, _nonnegative(x, t, component))

            total += float(evaluate(term.coef, t)) * term.kernel.integrate(t, hist, component, integrand)
        return total

    def beta(self) -> CoefficientFn:
        out = self.terms[0].coef
        for term in self.terms[1:]:
            out = out + term.coef
        return out

    def lower_shape(self) -> Shape:
        return lower_of([term.shape for term in self.terms])

    def shapes(self) -> list[Shape]:
        return [term.shape for term in self.terms]

    def coefficients(self) -> list[CoefficientFn]:
        return [term.coef for term in self.terms]

    def max_lag(self, times: np.ndarray) -> float:
        return max(term.kernel.max_lag(times) for term in self.terms)

    def constant_lags(self) -> list[float] | None:
        out: list[float] = []
        for term in self.terms:
            lags = term.kernel.constant_lags()
            if lags is None:
                return None
            out.extend(lags)
        return out

    def rescaled(self, v: float) -> KernelBirth:
        return KernelBirth(tuple(BirthTerm(t.coef, t.shape.rescaled(v), t.kernel) for t in self.terms))

    def validate(self, times: np.ndarray) -> None:
        for term in self.terms:
            if np.any(np.asarray(evaluate(term.coef, times)) < 0):
                raise ModelConstraintError("birth coefficients must be nonnegative")
            term.shape.validate(times)


@dataclass(frozen=True)
class DistributedTerm:
    """b(t) * integral over [t - lag(t), t] of lam(s) g(., x(s)) ds"""

    b: CoefficientFn
    lam: CoefficientFn
    lag: CoefficientFn
    shape: Shape


@dataclass(frozen=True)
class DistributedBirth:
    terms: tuple[DistributedTerm, ...]
    # time argument of the shape inside the integral: integration variable s or outer t
    evaluation_time: Literal["s", "t"] = "s"
    kind: ClassVar[str] = "distributed_birth"

    def evaluate(self, t: float, hist: History, component: int) -> float:
        total = 0.0
        for term in self.terms:
            lag = float(evaluate(term.lag, t))
            if lag <= 0:
                continue

            def integrand(s, x, term=term):
                x = _nonnegative(x, t, component)
                when = s if self.evaluation_time == "s" else np.full_like(s, t)
                return np.asarray(evaluate(term.lam, s, check_domain=False)) * term.shape.value(when, x)

            total += float(evaluate(term.b, t)) * hist.integral(component, t - lag, t, integrand)
        return total

    def beta(self) -> CoefficientFn:
        out = lag_integral(self.terms[0].b, self.terms[0].lam, self.terms[0].lag)
        for term in self.terms[1:]:
            out = out + lag_integral(term.b, term.lam, term.lag)
        return out

    def lower_shape(self) -> Shape:
        return lower_of([term.shape for term in self.terms])

    def shapes(self) -> list[Shape]:
        return [term.shape for term in self.terms]

    def coefficients(self) -> list[CoefficientFn]:
        return [term.b for term in self.terms]

    def max_lag(self, times: np.ndarray) -> float:
        return max(float(np.max(evaluate(term.lag, times))) for term in self.terms)

    def constant_lags(self) -> list[float] | None:
        if not all(term.lag.is_constant for term in self.terms):
            return None
        return [float(evaluate(term.lag, term.lag.domain_start)) for term in self.terms]

    def rescaled(self, v: float) -> DistributedBirth:
        terms = tuple(DistributedTerm(t.b, t.lam, t.lag, t.shape.rescaled(v)) for t in self.terms)
        return DistributedBirth(terms, self.evaluation_time)

    def validate(self, times: np.ndarray) -> None:
        for term in self.terms:
            if np.any(np.asarray(evaluate(term.b, times)) < 0):
                raise ModelConstraintError("distributed birth coefficients b must be nonnegative")
            if np.any(np.asarray(evaluate(term.lam, times, check_domain=False)) < 0):
                raise ModelConstraintError("distributed birth densities lambda must be nonnegative")
            term.shape.validate(times)


@dataclass(frozen=True)
class WindowMinBirth:
    """beta(t) * H(min of x over [t - window, t])"""

    beta_fn: CoefficientFn
    shape: Shape
    window: float
    kind: ClassVar[str] = "window_min_birth"

    def evaluate(self, t: float, hist: History, component: int) -> float:
        low = hist.window_min(component, t - self.window, t)
        low = float(_nonnegative(np.asarray([low]), t, component)[0])
        return float(evaluate(self.beta_fn, t)) * float(self.shape.value(t, np.asarray(low)))

    def beta(self) -> CoefficientFn:
        return self.beta_fn

    def lower_shape(self) -> Shape:
        return self.shape.worst_case()

    def shapes(self) -> list[Shape]:
        return [self.shape]

    def coefficients(self) -> list[CoefficientFn]:
        return [self.beta_fn]

    def max_lag(self, times: np.ndarray) -> float:
        return self.window

    def constant_lags(self) -> list[float] | None:
        return [self.window]

    def rescaled(self, v: float) -> WindowMinBirth:
        return WindowMinBirth(self.beta_fn, self.shape.rescaled(v), self.window)

    def validate(self, times: np.ndarray) -> None:
        if np.any(np.asarray(evaluate(self.beta_fn, times)) < 0):
            raise ModelConstraintError("window-min birth coefficient must be nonnegative")


@dataclass(frozen=True)
class CustomEnvelope:
    """Library-only birth term given by a callable; not serializable."""

    evaluator: Callable[[float, History, int], float]
    beta_fn: CoefficientFn | None = None
    h_minus: Shape | None = None
    lag: float = 0.0
    bounded: bool = False
    kind: ClassVar[str] = "custom_envelope"

    def evaluate(self, t: float, hist: History, component: int) -> float:
        return float(self.evaluator(t, hist, component))

    def beta(self) -> CoefficientFn:
        if self.beta_fn is None:
            raise EnvelopeError("custom birth term declares no beta")
        return self.beta_fn

    def lower_shape(self) -> Shape:
        if self.h_minus is None:
            raise EnvelopeError("custom birth term declares no lower shape h-")
        return self.h_minus

    def shapes(self) -> list[Shape]:
        return [self.h_minus] if self.h_minus is not None else []

    def coefficients(self) -> list[CoefficientFn]:
        return [self.beta_fn] if self.beta_fn is not None else []

    def max_lag(self, times: np.ndarray) -> float:
        return self.lag

    def constant_lags(self) -> list[float] | None:
        return [self.lag] if self.lag > 0 else []

    def rescaled(self, v: float) -> CustomEnvelope:
        inner = self.evaluator

        def evaluator(t: float, hist: History, component: int) -> float:
            return inner(t, _ScaledHistory(hist, v), component) / v

        h_minus = self.h_minus.rescaled(v) if self.h_minus is not None else None
        return CustomEnvelope(evaluator, self.beta_fn, h_minus, self.lag, self.bounded)

    def validate(self, times: np.ndarray) -> None:
        return None


class _ScaledHistory(History):
    """View of a history multiplied by a constant."""

    def __init__(self, base: History, factor: float):
        self.base = base
        self.factor = factor
        self.n = base.n

    def value(self, component, t):
        return self.factor * self.base.value(component, t)

    def integral(self, component, start, end, integrand):
        return self.base.integral(component, start, end, lambda s, x: integrand(s, self.factor * x))

    def window_min(self, component, start, end):
        return self.factor * self.base.window_min(component, start, end)

    def window_max(self, component, start, end):
        return self.factor * self.base.window_max(component, start, end)


Nonlinearity = Union[KernelBirth, DistributedBirth, WindowMinBirth, CustomEnvelope]


def nonlinearity_eval(f: Nonlinearity | None, t: float, hist: History, component: int) -> float:
    """Nonnegative birth value of component at t; 0 when the component has no birth term."""
    if f is None:
        return 0.0
    return f.evaluate(t, hist, component)

"""Scalar birth shapes h(t, x) and harvest shapes g(x)."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from src.config import settings
from src.errors import EnvelopeError, ModelConstraintError
from src.timefn import CoefficientFn, const, derived_bounds, evaluate, scaled


def _coef(fn: CoefficientFn, t) -> np.ndarray:
    return np.asarray(evaluate(fn, t, check_domain=False))


def _upper(fn: CoefficientFn, what: str) -> float:
    bounds = derived_bounds(fn)
    if bounds is None or not math.isfinite(bounds[1]):
        raise EnvelopeError(f"{what} needs a declared upper bound")
    return bounds[1]


def _lower(fn: CoefficientFn) -> float:
    bounds = derived_bounds(fn)
    return bounds[0] if bounds is not None else 0.0


class Shape(ABC):
    kind: ClassVar[str] = ""

    @abstractmethod
    def value(self, t, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def gain(self) -> float:
        """Right derivative at x = 0."""

    @abstractmethod
    def worst_case(self) -> Shape:
        """Time-independent lower shape built from the worst-case constants."""

    @abstractmethod
    def monotone_cap(self) -> float:
        """Largest m such that the worst-case shape increases on [0, m]."""

    @abstractmethod
    def limit_at_infinity(self) -> float: ...

    @abstractmethod
    def sup_bound(self) -> float:
        """Upper bound of h over x >= 0 and all t (inf if unknown)."""

    @abstractmethod
    def rescaled(self, v: float) -> Shape:
        """The shape x -> h(t, v x) / v."""

    def validate(self, times: np.ndarray) -> None:
        return None

    def __call__(self, x, t: float = 0.0):
        return self.value(t, np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Nicholson(Shape):
    """x exp(-c(t) x)"""

    c: CoefficientFn
    kind: ClassVar[str] = "nicholson"

    def value(self, t, x):
        return x * np.exp(-_coef(self.c, t) * x)

    def gain(self) -> float:
        return 1.0

    def worst_case(self) -> Nicholson:
        return Nicholson(const(_upper(self.c, "Nicholson coefficient c")))

    def monotone_cap(self) -> float:
        return 1.0 / _upper(self.c, "Nicholson coefficient c")

    def limit_at_infinity(self) -> float:
        return 0.0

    def sup_bound(self) -> float:
        lo = _lower(self.c)
        return 1.0 / (math.e * lo) if lo > 0 else math.inf

    def rescaled(self, v: float) -> Nicholson:
        return Nicholson(scaled(self.c, v))

    def validate(self, times):
        if np.any(_coef(self.c, times) <= 0):
            raise ModelConstraintError("Nicholson coefficient c(t) must be positive")


@dataclass(frozen=True)
class MackeyGlass(Shape):
    """x / (1 + c(t) x^alpha), alpha >= 1"""

    c: CoefficientFn
    alpha: float = 1.0
    kind: ClassVar[str] = "mackey_glass"

    def __post_init__(self):
        if self.alpha < 1:
            raise ModelConstraintError(f"Mackey-Glass exponent must be >= 1, got {self.alpha}")

    def value(self, t, x):
        return x / (1.0 + _coef(self.c, t) * np.power(x, self.alpha))

    def gain(self) -> float:
        return 1.0

    def worst_case(self) -> MackeyGlass:
        return MackeyGlass(const(_upper(self.c, "Mackey-Glass coefficient c")), self.alpha)

    def monotone_cap(self) -> float:
        c_bar = _upper(self.c, "Mackey-Glass coefficient c")
        if self.alpha == 1.0:
            return settings.envelope.monotone_cap_limit
        return (1.0 / (c_bar * (self.alpha - 1.0))) ** (1.0 / self.alpha)

    def limit_at_infinity(self) -> float:
        if self.alpha == 1.0:
            return 1.0 / _upper(self.c, "Mackey-Glass coefficient c")
        return 0.0

    def sup_bound(self) -> float:
        lo = _lower(self.c)
        if lo <= 0:
            return math.inf
        if self.alpha == 1.0:
            return 1.0 / lo
        peak = (1.0 / (lo * (self.alpha - 1.0))) ** (1.0 / self.alpha)
        return peak * (self.alpha - 1.0) / self.alpha

    def rescaled(self, v: float) -> MackeyGlass:
        return MackeyGlass(scaled(self.c, v**self.alpha), self.alpha)

    def validate(self, times):
        if np.any(_coef(self.c, times) <= 0):
            raise ModelConstraintError("Mackey-Glass coefficient c(t) must be positive")


@dataclass(frozen=True)
class ClampedPower(Shape):
    """scale * min(x, cap)^p"""

    p: float
    cap: float
    scale: float = 1.0
    kind: ClassVar[str] = "clamped_power"

    def __post_init__(self):
        if self.p <= 0 or self.cap <= 0 or self.scale <= 0:
            raise ModelConstraintError("clamped power needs p, cap and scale positive")

    def value(self, t, x):
        return self.scale * np.power(np.minimum(x, self.cap), self.p)

    def gain(self) -> float:
        if self.p == 1.0:
            return self.scale
        return 0.0 if self.p > 1.0 else math.inf

    def worst_case(self) -> ClampedPower:
        return self

    def monotone_cap(self) -> float:
        return self.cap

    def limit_at_infinity(self) -> float:
        return self.scale * self.cap**self.p

    def sup_bound(self) -> float:
        return self.limit_at_infinity()

    def rescaled(self, v: float) -> ClampedPower:
        return ClampedPower(self.p, self.cap / v, self.scale * v ** (self.p - 1.0))


@dataclass(frozen=True)
class WindowClamp(Shape):
    """H(x) = min(h(y), y) with y = min(x, m): the clamped envelope of the lower system."""

    inner: Shape
    m: float
    kind: ClassVar[str] = "window_clamp"

    def __post_init__(self):
        if self.m <= 0:
            raise ModelConstraintError(f"clamp level m must be positive, got {self.m}")

    def value(self, t, x):
        y = np.minimum(x, self.m)
        return np.minimum(self.inner.value(t, y), y)

    def gain(self) -> float:
        return min(self.inner.gain(), 1.0)

    def worst_case(self) -> WindowClamp:
        return self

    def monotone_cap(self) -> float:
        return self.m

    def limit_at_infinity(self) -> float:
        return float(self.value(0.0, np.asarray(self.m)))

    def sup_bound(self) -> float:
        return self.limit_at_infinity()

    def rescaled(self, v: float) -> WindowClamp:
        return WindowClamp(self.inner.rescaled(v), self.m / v)


@dataclass(frozen=True)
class PointwiseMin(Shape):
    parts: tuple[Shape, ...]
    kind: ClassVar[str] = "pointwise_min"

    def value(self, t, x):
        return np.min([part.value(t, x) for part in self.parts], axis=0)

    def gain(self) -> float:
        return min(part.gain() for part in self.parts)

    def worst_case(self) -> PointwiseMin:
        return PointwiseMin(tuple(part.worst_case() for part in self.parts))

    def monotone_cap(self) -> float:
        return min(part.monotone_cap() for part in self.parts)

    def limit_at_infinity(self) -> float:
        return min(part.limit_at_infinity() for part in self.parts)

    def sup_bound(self) -> float:
        return min(part.sup_bound() for part in self.parts)

    def rescaled(self, v: float) -> PointwiseMin:
        return PointwiseMin(tuple(part.rescaled(v) for part in self.parts))


def lower_of(shapes: list[Shape]) -> Shape:
    """Worst-case lower shape of several birth shapes."""
    worst = []
    for shape in shapes:
        candidate = shape.worst_case()
        if candidate not in worst:
            worst.append(candidate)
    if len(worst) == 1:
        return worst[0]
    return PointwiseMin(tuple(worst))


class HarvestShape(ABC):
    kind: ClassVar[str] = ""

    @abstractmethod
    def value(self, x: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class HarvestPower(HarvestShape):
    """g(x) = x^p with p > 1"""

    p: float
    kind: ClassVar[str] = "power"

    def __post_init__(self):
        if self.p <= 1:
            raise ModelConstraintError("harvest power needs p > 1 so that g'(0+) = 0")

    def value(self, x):
        return np.power(np.maximum(x, 0.0), self.p)


@dataclass(frozen=True)
class HarvestHill(HarvestShape):
    """g(x) = x^p / (k^p + x^p) with p > 1"""

    p: float
    k: float
    kind: ClassVar[str] = "hill"

    def __post_init__(self):
        if self.p <= 1 or self.k <= 0:
            raise ModelConstraintError("Hill harvest needs p > 1 and k > 0")

    def value(self, x):
        xp = np.power(np.maximum(x, 0.0), self.p)
        return xp / (self.k**self.p + xp)

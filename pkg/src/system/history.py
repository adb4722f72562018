from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from src.errors import HistoryGapError
from src.timefn import CoefficientFn, evaluate

# integrand(s, x(s)) -> values, vectorized over s
Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


class History(ABC):
    """Read access to a solution segment: point values, integrals and window extrema."""

    n: int

    @abstractmethod
    def value(self, component: int, t: float) -> float: ...

    @abstractmethod
    def integral(self, component: int, start: float, end: float, integrand: Integrand) -> float:
        """Integral over [start, end] of integrand(s, x_component(s)) ds."""

    @abstractmethod
    def window_min(self, component: int, start: float, end: float) -> float: ...

    @abstractmethod
    def window_max(self, component: int, start: float, end: float) -> float: ...

    def values(self, t: float) -> np.ndarray:
        return np.array([self.value(i, t) for i in range(self.n)])


class FunctionHistory(History):
    """History given by closed-form functions of absolute time."""

    SCAN_POINTS = 64

    def __init__(self, components: Sequence[CoefficientFn], start: float | None = None):
        self.components = tuple(components)
        self.n = len(self.components)
        self.start = start

    def _check(self, t: float) -> None:
        if self.start is not None and t < self.start - 1e-12:
            raise HistoryGapError(f"t={t:.6g} precedes the history start {self.start:.6g}")

    def value(self, component: int, t: float) -> float:
        self._check(t)
        return float(evaluate(self.components[component], t, check_domain=False))

    def integral(self, component: int, start: float, end: float, integrand: Integrand) -> float:
        self._check(start)
        if end <= start:
            return 0.0
        fn = self.components[component]

        def scalar(s: float) -> float:
            x = np.asarray([evaluate(fn, s, check_domain=False)])
            return float(integrand(np.asarray([s]), x)[0])

        result, _ = quad(scalar, start, end, epsabs=1e-13, epsrel=1e-12, limit=200)
        return float(result)

    def _extremum(self, component: int, start: float, end: float, sign: float) -> float:
        self._check(start)
        fn = self.components[component]
        if end <= start:
            return float(evaluate(fn, start, check_domain=False))
        grid = np.linspace(start, end, self.SCAN_POINTS)
        values = sign * np.asarray(evaluate(fn, grid, check_domain=False))
        k = int(np.argmin(values))
        best = float(values[k])
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        if hi > lo:
            res = minimize_scalar(
                lambda s: sign * float(evaluate(fn, s, check_domain=False)),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": 1e-10},
            )
            best = min(best, float(res.fun))
        return sign * best

    def window_min(self, component: int, start: float, end: float) -> float:
        return self._extremum(component, start, end, 1.0)

    def window_max(self, component: int, start: float, end: float) -> float:
        return self._extremum(component, start, end, -1.0)

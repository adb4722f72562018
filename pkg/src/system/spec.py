from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.config import settings
from src.errors import ModelConstraintError
from src.system.history import History
from src.system.kernels import DelayKernel, InstantPoint
from src.system.nonlinearity import Nonlinearity, nonlinearity_eval
from src.system.shapes import HarvestHill, HarvestPower, HarvestShape
from src.timefn import CoefficientFn, as_fn, evaluate, scaled


@dataclass(frozen=True)
class LinearTerm:
    """a(t) * integral of x_j(t+s) d nu(t, s), with a(t) >= 0."""

    a: CoefficientFn
    kernel: DelayKernel = field(default_factory=InstantPoint)


@dataclass(frozen=True)
class HarvestTerm:
    """K_i(t, x) = kappa(t) g(x), g(0) = 0 and g'(0+) = 0."""

    kappa: CoefficientFn
    shape: HarvestShape

    def value(self, t: float, x: float) -> float:
        return float(evaluate(self.kappa, t)) * float(self.shape.value(np.asarray(x)))

    def rescaled(self, v: float) -> HarvestTerm:
        if isinstance(self.shape, HarvestPower):
            return HarvestTerm(scaled(self.kappa, v ** (self.shape.p - 1.0)), self.shape)
        if isinstance(self.shape, HarvestHill):
            return HarvestTerm(scaled(self.kappa, 1.0 / v), HarvestHill(self.shape.p, self.shape.k / v))
        raise TypeError(f"cannot rescale harvest shape {type(self.shape).__name__}")


@dataclass(frozen=True)
class SystemSpec:
    """
    x_i' = -d_i(t) x_i + sum_j L_ij(t) x_j,t + f_i(t, x_i,t) - K_i(t, x_i(t))

    linear[i][j] holds the (possibly empty) tuple of nonnegative functionals from x_j to x_i.
    """

    n: int
    tau: float
    decay: tuple[CoefficientFn, ...]
    linear: tuple[tuple[tuple[LinearTerm, ...], ...], ...]
    birth: tuple[Nonlinearity | None, ...]
    harvest: tuple[HarvestTerm | None, ...]
    domain_start: float = 0.0
    name: str = ""

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise ModelConstraintError("system dimension must be at least 1")
        if self.tau < 0:
            raise ModelConstraintError(f"max delay must be nonnegative, got {self.tau}")
        if len(self.decay) != n or len(self.birth) != n or len(self.harvest) != n:
            raise ModelConstraintError("decay, birth and harvest need one entry per component")
        if len(self.linear) != n or any(len(row) != n for row in self.linear):
            raise ModelConstraintError("linear terms must form an n x n matrix")
        self.validate()

    def validation_times(self) -> np.ndarray:
        start = self.domain_start
        near = np.linspace(start, start + 10.0 * max(self.tau, 1.0), 201)
        far = start + np.geomspace(1.0, max(settings.grid.t_max, 10.0), 200)
        return np.unique(np.concatenate([near, far]))

    def validate(self) -> None:
        times = self.validation_times()
        slack = 1e-12 * max(1.0, self.tau)
        for i, d in enumerate(self.decay):
            if np.any(np.asarray(evaluate(d, times)) <= 0):
                raise ModelConstraintError(f"decay d{i + 1}(t) must be positive")
        for i, row in enumerate(self.linear):
            for j, terms in enumerate(row):
                for term in terms:
                    if np.any(np.asarray(evaluate(term.a, times)) < 0):
                        raise ModelConstraintError(f"linear coefficient a{i + 1}{j + 1}(t) must be nonnegative")
                    lag = term.kernel.max_lag(times)
                    if lag < 0 or lag > self.tau + slack:
                        raise ModelConstraintError(
                            f"kernel of L{i + 1}{j + 1} reaches lag {lag:.6g} beyond tau={self.tau:.6g}"
                        )
        for i, f in enumerate(self.birth):
            if f is None:
                continue
            f.validate(times)
            lag = f.max_lag(times)
            if lag > self.tau + slack:
                raise ModelConstraintError(f"birth term of x{i + 1} reaches lag {lag:.6g} beyond tau={self.tau:.6g}")
        for i, k in enumerate(self.harvest):
            if k is not None and np.any(np.asarray(evaluate(k.kappa, times)) < 0):
                raise ModelConstraintError(f"harvest coefficient kappa{i + 1}(t) must be nonnegative")

    def coupling(self, i: int, j: int) -> CoefficientFn | None:
        """a_ij(t) = sum of the term coefficients (operator norm of L_ij)."""
        terms = self.linear[i][j]
        if not terms:
            return None
        out = terms[0].a
        for term in terms[1:]:
            out = out + term.a
        return out

    def constant_lags(self) -> list[float] | None:
        """Every lag in the system if all are constant, else None."""
        out: list[float] = []
        for row in self.linear:
            for terms in row:
                for term in terms:
                    lags = term.kernel.constant_lags()
                    if lags is None:
                        return None
                    out.extend(lags)
        for f in self.birth:
            if f is None:
                continue
            lags = f.constant_lags()
            if lags is None:
                return None
            out.extend(lags)
        return out


def make_system(
    decay: Sequence[CoefficientFn | float],
    linear: Sequence[Sequence[LinearTerm | Sequence[LinearTerm] | None]] | None = None,
    birth: Sequence[Nonlinearity | None] | None = None,
    harvest: Sequence[HarvestTerm | None] | None = None,
    tau: float | None = None,
    domain_start: float = 0.0,
    name: str = "",
) -> SystemSpec:
    """Assemble a SystemSpec, filling empty slots; tau defaults to the largest lag found."""
    n = len(decay)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = linear[i][j] if linear is not None else None
            if entry is None:
                row.append(())
            elif isinstance(entry, LinearTerm):
                row.append((entry,))
            else:
                row.append(tuple(entry))
        rows.append(tuple(row))
    births = tuple(birth) if birth is not None else (None,) * n
    harvests = tuple(harvest) if harvest is not None else (None,) * n
    decays = tuple(as_fn(d) for d in decay)
    if tau is None:
        tau = _largest_lag(rows, births, domain_start)
    return SystemSpec(n, float(tau), decays, tuple(rows), births, harvests, domain_start, name)


def _largest_lag(rows, births, start: float) -> float:
    times = np.linspace(start, start + 100.0, 201)
    lags = [0.0]
    for row in rows:
        for terms in row:
            lags.extend(term.kernel.max_lag(times) for term in terms)
    lags.extend(f.max_lag(times) for f in births if f is not None)
    return max(lags)


def linear_term_eval(term: LinearTerm, t: float, hist: History, component: int) -> float:
    return float(evaluate(term.a, t)) * term.kernel.integrate(t, hist, component)


def has_linear_delays(sys: SystemSpec) -> bool:
    return any(
        not term.kernel.is_instant for row in sys.linear for terms in row for term in terms
    )


def rhs_eval(sys: SystemSpec, t: float, hist: History) -> np.ndarray:
    out = np.empty(sys.n)
    for i in range(sys.n):
        x_now = hist.value(i, t)
        total = -float(evaluate(sys.decay[i], t)) * x_now
        for j, terms in enumerate(sys.linear[i]):
            for term in terms:
                total += linear_term_eval(term, t, hist, j)
        total += nonlinearity_eval(sys.birth[i], t, hist, i)
        harvest = sys.harvest[i]
        if harvest is not None:
            total -= harvest.value(t, x_now)
        out[i] = total
    return out

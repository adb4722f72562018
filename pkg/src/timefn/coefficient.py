from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from src.errors import DomainError, NonFiniteError

Number = Union[float, int]
TimeLike = Union[float, np.ndarray]

# Gauss-Legendre rule used by lag_integral nodes
_LAG_NODES = 8


class DerivativeUnavailable(Exception):
    """The node has no exact derivative (piecewise, table, lag_integral)."""


class Node:
    """Base class of the expression tree. Nodes are immutable and vectorized in t."""

    kind: str = ""

    def value(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def slope(self, t: np.ndarray) -> np.ndarray:
        raise DerivativeUnavailable(self.kind)

    def is_constant(self) -> bool:
        return False


@dataclass(frozen=True)
class Const(Node):
    c: float
    kind: str = field(default="const", init=False, repr=False)

    def value(self, t):
        return np.full(np.shape(t), float(self.c))

    def slope(self, t):
        return np.zeros(np.shape(t))

    def is_constant(self) -> bool:
        return True


@dataclass(frozen=True)
class TPow(Node):
    """scale * (t + shift) ** eta"""

    eta: float
    scale: float = 1.0
    shift: float = 0.0
    kind: str = field(default="t_pow", init=False, repr=False)

    def value(self, t):
        return self.scale * np.power(t + self.shift, self.eta)

    def slope(self, t):
        if self.eta == 0:
            return np.zeros(np.shape(t))
        return self.scale * self.eta * np.power(t + self.shift, self.eta - 1)


@dataclass(frozen=True)
class Affine(Node):
    slope_coef: float
    intercept: float
    kind: str = field(default="affine", init=False, repr=False)

    def value(self, t):
        return self.slope_coef * t + self.intercept

    def slope(self, t):
        return np.full(np.shape(t), float(self.slope_coef))

    def is_constant(self) -> bool:
        return self.slope_coef == 0


@dataclass(frozen=True)
class Rational(Node):
    """Ratio of two polynomials in t, coefficients in ascending order."""

    num: tuple[float, ...]
    den: tuple[float, ...] = (1.0,)
    kind: str = field(default="rational", init=False, repr=False)

    def value(self, t):
        return npoly.polyval(t, self.num) / npoly.polyval(t, self.den)

    def slope(self, t):
        p = npoly.polyval(t, self.num)
        q = npoly.polyval(t, self.den)
        dp = npoly.polyval(t, npoly.polyder(self.num)) if len(self.num) > 1 else 0.0
        dq = npoly.polyval(t, npoly.polyder(self.den)) if len(self.den) > 1 else 0.0
        return (dp * q - p * dq) / (q * q)


@dataclass(frozen=True)
class Exp(Node):
    """scale * exp(rate * t + offset)"""

    rate: float
    offset: float = 0.0
    scale: float = 1.0
    kind: str = field(default="exp", init=False, repr=False)

    def value(self, t):
        return self.scale * np.exp(self.rate * t + self.offset)

    def slope(self, t):
        return self.rate * self.value(t)


@dataclass(frozen=True)
class Sum(Node):
    terms: tuple[Node, ...]
    kind: str = field(default="sum", init=False, repr=False)

    def value(self, t):
        out = np.zeros(np.shape(t))
        for term in self.terms:
            out = out + term.value(t)
        return out

    def slope(self, t):
        out = np.zeros(np.shape(t))
        for term in self.terms:
            out = out + term.slope(t)
        return out

    def is_constant(self) -> bool:
        return all(term.is_constant() for term in self.terms)


@dataclass(frozen=True)
class Prod(Node):
    factors: tuple[Node, ...]
    kind: str = field(default="prod", init=False, repr=False)

    def value(self, t):
        out = np.ones(np.shape(t))
        for factor in self.factors:
            out = out * factor.value(t)
        return out

    def slope(self, t):
        values = [factor.value(t) for factor in self.factors]
        out = np.zeros(np.shape(t))
        for i, factor in enumerate(self.factors):
            part = factor.slope(t)
            for j, other in enumerate(values):
                if j != i:
                    part = part * other
            out = out + part
        return out

    def is_constant(self) -> bool:
        return all(factor.is_constant() for factor in self.factors)


@dataclass(frozen=True)
class Quot(Node):
    num: Node
    den: Node
    kind: str = field(default="quot", init=False, repr=False)

    def value(self, t):
        return self.num.value(t) / self.den.value(t)

    def slope(self, t):
        p, q = self.num.value(t), self.den.value(t)
        return (self.num.slope(t) * q - p * self.den.slope(t)) / (q * q)

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()


@dataclass(frozen=True)
class Piecewise(Node):
    """pieces[k] is active on [breaks[k-1], breaks[k])."""

    breaks: tuple[float, ...]
    pieces: tuple[Node, ...]
    kind: str = field(default="piecewise", init=False, repr=False)

    def __post_init__(self):
        if len(self.pieces) != len(self.breaks) + 1:
            raise ValueError("piecewise needs exactly one more piece than breaks")
        if any(b2 <= b1 for b1, b2 in zip(self.breaks, self.breaks[1:])):
            raise ValueError("piecewise breaks must be strictly increasing")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        index = np.searchsorted(np.asarray(self.breaks), t, side="right")
        out = np.empty(t.shape)
        for k, piece in enumerate(self.pieces):
            mask = index == k
            if np.any(mask):
                out[mask] = piece.value(t[mask])
        return out

    def is_constant(self) -> bool:
        if not all(isinstance(piece, Const) for piece in self.pieces):
            return False
        return len({piece.c for piece in self.pieces}) == 1


@dataclass(frozen=True)
class Table(Node):
    """Linear interpolation through (times, values), flat outside the table."""

    times: tuple[float, ...]
    values: tuple[float, ...]
    kind: str = field(default="table", init=False, repr=False)

    def __post_init__(self):
        if len(self.times) != len(self.values) or len(self.times) < 2:
            raise ValueError("table needs at least two (time, value) pairs of equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("table times must be strictly increasing")

    def value(self, t):
        return np.interp(t, self.times, self.values)

    def is_constant(self) -> bool:
        return len(set(self.values)) == 1


@dataclass(frozen=True)
class LagIntegral(Node):
    """coef(t) * integral of density(s) over [t - lag(t), t]."""

    coef: Node
    density: Node
    lag: Node
    kind: str = field(default="lag_integral", init=False, repr=False)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        nodes, weights = np.polynomial.legendre.leggauss(_LAG_NODES)
        lag = self.lag.value(t)
        half = 0.5 * lag
        s = t[..., None] - half[..., None] + half[..., None] * nodes
        dens = self.density.value(s.reshape(-1)).reshape(s.shape)
        return self.coef.value(t) * half * np.sum(weights * dens, axis=-1)

    def is_constant(self) -> bool:
        return self.coef.is_constant() and self.density.is_constant() and self.lag.is_constant()


@dataclass(frozen=True)
class CoefficientFn:
    """
    A real-valued function of time built from a closed expression tree.

    declared_bounds are builder-asserted (inf, sup) over [domain_start, inf).
    """

    expr: Node
    declared_bounds: tuple[float, float] | None = None
    domain_start: float = 0.0

    def __post_init__(self):
        if self.declared_bounds is not None:
            lo, hi = self.declared_bounds
            if lo > hi:
                raise ValueError(f"declared bounds are reversed: {self.declared_bounds}")
            object.__setattr__(self, "declared_bounds", (float(lo), float(hi)))

    def __call__(self, t: TimeLike) -> TimeLike:
        return evaluate(self, t)

    @property
    def is_constant(self) -> bool:
        return self.expr.is_constant()

    def with_bounds(self, lo: float, hi: float) -> CoefficientFn:
        return CoefficientFn(self.expr, (lo, hi), self.domain_start)

    def with_domain(self, start: float) -> CoefficientFn:
        return CoefficientFn(self.expr, self.declared_bounds, start)

    def __add__(self, other):
        return _combine(self, other, "sum")

    def __radd__(self, other):
        return _combine(other, self, "sum")

    def __sub__(self, other):
        return _combine(self, _negate(other), "sum")

    def __rsub__(self, other):
        return _combine(other, _negate(self), "sum")

    def __mul__(self, other):
        return _combine(self, other, "prod")

    def __rmul__(self, other):
        return _combine(other, self, "prod")

    def __truediv__(self, other):
        return _combine(self, other, "quot")

    def __rtruediv__(self, other):
        return _combine(other, self, "quot")

    def __neg__(self):
        return _negate(self)


def as_fn(value: CoefficientFn | Number) -> CoefficientFn:
    if isinstance(value, CoefficientFn):
        return value
    return const(float(value))


def _negate(value) -> CoefficientFn:
    fn = as_fn(value)
    if isinstance(fn.expr, Const):
        return const(-fn.expr.c)
    return CoefficientFn(Prod((Const(-1.0), fn.expr)), domain_start=fn.domain_start)


def _combine(left, right, how: str) -> CoefficientFn:
    a, b = as_fn(left), as_fn(right)
    start = max(a.domain_start, b.domain_start)
    if isinstance(a.expr, Const) and isinstance(b.expr, Const):
        x, y = a.expr.c, b.expr.c
        folded = {"sum": lambda: x + y, "prod": lambda: x * y, "quot": lambda: x / y}[how]()
        return const(folded).with_domain(start)
    if how == "quot":
        return CoefficientFn(Quot(a.expr, b.expr), domain_start=start)
    node_type = Sum if how == "sum" else Prod
    children: list[Node] = []
    for part in (a.expr, b.expr):
        if isinstance(part, node_type):
            children.extend(part.terms if how == "sum" else part.factors)
        else:
            children.append(part)
    return CoefficientFn(node_type(tuple(children)), domain_start=start)


def const(c: Number, bounds: bool = True) -> CoefficientFn:
    """Constants always carry their own exact bounds."""
    c = float(c)
    return CoefficientFn(Const(c), (c, c) if bounds else None)


def t_pow(eta: float, scale: float = 1.0, shift: float = 0.0) -> CoefficientFn:
    return CoefficientFn(TPow(float(eta), float(scale), float(shift)))


def affine(slope: float, intercept: float) -> CoefficientFn:
    return CoefficientFn(Affine(float(slope), float(intercept)))


def rational(num: Sequence[float], den: Sequence[float] = (1.0,)) -> CoefficientFn:
    return CoefficientFn(Rational(tuple(map(float, num)), tuple(map(float, den))))


def exp_fn(rate: float, offset: float = 0.0, scale: float = 1.0) -> CoefficientFn:
    return CoefficientFn(Exp(float(rate), float(offset), float(scale)))


def piecewise(breaks: Sequence[float], pieces: Sequence[CoefficientFn | Number]) -> CoefficientFn:
    return CoefficientFn(
        Piecewise(tuple(map(float, breaks)), tuple(as_fn(p).expr for p in pieces))
    )


def table(times: Sequence[float], values: Sequence[float]) -> CoefficientFn:
    return CoefficientFn(Table(tuple(map(float, times)), tuple(map(float, values))))


def lag_integral(
    coef: CoefficientFn | Number, density: CoefficientFn | Number, lag: CoefficientFn | Number
) -> CoefficientFn:
    return CoefficientFn(LagIntegral(as_fn(coef).expr, as_fn(density).expr, as_fn(lag).expr))


def evaluate(f: CoefficientFn, t: TimeLike, check_domain: bool = True) -> TimeLike:
    """
    Evaluate the composition tree at t (scalar or array).

    check_domain=False extends the formula below the domain start; inner
    integrals over [t - lag, t] use it near the initial time.

    :raises DomainError: t below the domain start
    :raises NonFiniteError: an intermediate produced inf or nan
    """
    scalar = np.ndim(t) == 0
    ts = np.asarray(t, dtype=float)
    if check_domain and np.any(ts < f.domain_start - 1e-12 * max(1.0, abs(f.domain_start))):
        raise DomainError(f"t={float(np.min(ts)):.6g} is below the domain start {f.domain_start:.6g}")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = f.expr.value(ts)
    finite = np.isfinite(out)
    if not np.all(finite):
        bad = np.ravel(np.broadcast_to(ts, np.shape(out))[~finite])[0]
        raise NonFiniteError(f"{f.expr.kind} evaluated to a non-finite value at t={float(bad):.6g}")
    return float(out) if scalar else out


def derivative(f: CoefficientFn, t: TimeLike) -> TimeLike | None:
    """Exact forward-mode derivative, or None if some node has no analytic slope."""
    scalar = np.ndim(t) == 0
    ts = np.asarray(t, dtype=float)
    try:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = f.expr.slope(ts)
    except DerivativeUnavailable:
        return None
    if not np.all(np.isfinite(out)):
        raise NonFiniteError(f"derivative of {f.expr.kind} is not finite")
    return float(out) if scalar else out


def central_difference(f: CoefficientFn, t: float) -> float:
    step = 1e-6 * max(1.0, abs(t))
    return (evaluate(f, t + step) - evaluate(f, t - step)) / (2.0 * step)


def slope_or_difference(f: CoefficientFn, t: float) -> float:
    exact = derivative(f, t)
    if exact is not None:
        return exact
    if t - 1e-6 * max(1.0, abs(t)) < f.domain_start:
        step = 1e-6 * max(1.0, abs(t))
        return (evaluate(f, t + step) - evaluate(f, t)) / step
    return central_difference(f, t)

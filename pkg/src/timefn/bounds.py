from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from src.config import settings
from src.errors import InconsistentBoundsError
from src.logger import logger as log
from src.timefn.coefficient import (
    Affine,
    CoefficientFn,
    Const,
    Exp,
    LagIntegral,
    Node,
    Piecewise,
    Prod,
    Quot,
    Sum,
    Table,
    TPow,
    evaluate,
)

Interval = tuple[float, float]


@dataclass(frozen=True)
class Boundedness:
    bounded_above: bool
    bounded_below_positive: bool
    # "declared", "derived" (interval arithmetic) or "sampled"
    source: str
    inf: float
    sup: float
    tail_slope: float | None = None

    def to_dict(self) -> dict:
        return {
            "bounded_above": self.bounded_above,
            "bounded_below_positive": self.bounded_below_positive,
            "source": self.source,
            "inf": _finite_or_str(self.inf),
            "sup": _finite_or_str(self.sup),
            "tail_slope": self.tail_slope,
        }


def _finite_or_str(x: float) -> float | str:
    return x if math.isfinite(x) else str(x)


def sampled_bounds(f: CoefficientFn, window: tuple[float, float], grid_points: int) -> Interval:
    """
    Min and max of f over a uniform grid of the window.

    :raises InconsistentBoundsError: a sample escapes the declared bounds
    """
    t1, t2 = window
    if not t1 < t2:
        raise ValueError(f"empty window [{t1}, {t2}]")
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    values = evaluate(f, np.linspace(t1, t2, grid_points))
    lo, hi = float(np.min(values)), float(np.max(values))
    check_declared(f, values)
    return lo, hi


def check_declared(f: CoefficientFn, values: np.ndarray) -> None:
    if f.declared_bounds is None:
        return
    lo, hi = f.declared_bounds
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if np.any(values < lo - slack) or np.any(values > hi + slack):
        raise InconsistentBoundsError(
            f"samples in [{float(np.min(values)):.6g}, {float(np.max(values)):.6g}] "
            f"escape the declared bounds [{lo:.6g}, {hi:.6g}]"
        )


def _mul(a: Interval, b: Interval) -> Interval:
    with np.errstate(invalid="ignore"):
        products = [x * y for x in a for y in b]
    products = [0.0 if math.isnan(p) else p for p in products]
    return min(products), max(products)


def _interval(node: Node, start: float) -> Interval | None:
    if isinstance(node, Const):
        return node.c, node.c
    if isinstance(node, Affine):
        if node.slope_coef == 0:
            return node.intercept, node.intercept
        at_start = node.slope_coef * start + node.intercept
        return (at_start, math.inf) if node.slope_coef > 0 else (-math.inf, at_start)
    if isinstance(node, TPow):
        base = start + node.shift
        if base <= 0 and node.eta < 0:
            return None
        if node.eta == 0:
            return node.scale, node.scale
        if base < 0:
            # (t + shift) crosses zero inside the domain
            if not float(node.eta).is_integer():
                return None
            if int(node.eta) % 2 == 0:
                return (0.0, math.inf) if node.scale > 0 else (-math.inf, 0.0)
        edge = node.scale * base**node.eta
        if node.eta > 0:
            return (edge, math.inf) if node.scale > 0 else (-math.inf, edge)
        return (0.0, edge) if node.scale > 0 else (edge, 0.0)
    if isinstance(node, Exp):
        edge = node.scale * math.exp(node.rate * start + node.offset)
        if node.rate == 0:
            return edge, edge
        if node.rate < 0:
            return (0.0, edge) if node.scale > 0 else (edge, 0.0)
        return (edge, math.inf) if node.scale > 0 else (-math.inf, edge)
    if isinstance(node, Table):
        return min(node.values), max(node.values)
    if isinstance(node, Sum):
        parts = [_interval(term, start) for term in node.terms]
        if any(p is None for p in parts):
            return None
        return sum(p[0] for p in parts), sum(p[1] for p in parts)
    if isinstance(node, Prod):
        out: Interval = (1.0, 1.0)
        for factor in node.factors:
            part = _interval(factor, start)
            if part is None:
                return None
            out = _mul(out, part)
        return out
    if isinstance(node, Quot):
        num, den = _interval(node.num, start), _interval(node.den, start)
        if num is None or den is None or den[0] <= 0 <= den[1]:
            return None
        return _mul(num, (1.0 / den[1], 1.0 / den[0]))
    if isinstance(node, Piecewise):
        parts = [_interval(piece, start) for piece in node.pieces]
        if any(p is None for p in parts):
            return None
        return min(p[0] for p in parts), max(p[1] for p in parts)
    if isinstance(node, LagIntegral):
        coef, dens, lag = (_interval(part, start) for part in (node.coef, node.density, node.lag))
        if coef is None or dens is None or lag is None:
            return None
        return _mul(_mul(coef, dens), lag)
    return None


def derived_bounds(f: CoefficientFn) -> Interval | None:
    """Declared bounds if present, else interval arithmetic over the tree (None if unknown)."""
    if f.declared_bounds is not None:
        return f.declared_bounds
    return _interval(f.expr, f.domain_start)


def _tail_slope(times: np.ndarray, values: np.ndarray) -> float | None:
    tail = slice(len(times) // 2, None)
    t, y = times[tail], np.abs(values[tail])
    if np.any(y <= 0) or len(t) < 2:
        return None
    return float(np.polyfit(np.log(t), np.log(y), 1)[0])


def boundedness(
    f: CoefficientFn,
    window: tuple[float, float],
    grid_points: int,
    name: str = "",
) -> Boundedness:
    """
    Classify f over [window[0], inf) as bounded above and/or bounded below by a positive constant.

    Known bounds win. Otherwise the samples on a geometric grid and the
    log-log slope of their tail decide, and a warning is logged.
    """
    known = derived_bounds(f)
    if known is not None:
        lo, hi = known
        source = "declared" if f.declared_bounds is not None else "derived"
        return Boundedness(bool(math.isfinite(hi)), bool(lo > 0), source, float(lo), float(hi))

    t1, t2 = window
    times = np.geomspace(max(t1, 1e-9), t2, grid_points)
    values = np.asarray(evaluate(f, times))
    lo, hi = float(np.min(values)), float(np.max(values))
    slope = _tail_slope(times, values)
    growth = settings.grid.growth_slope

    tail_values = values[len(values) // 2 :]
    if np.all(tail_values <= 0):
        bounded_above = True
    else:
        bounded_above = slope is None or slope <= growth
    bounded_below_positive = bool(lo > 0 and (slope is None or slope >= -growth))

    log.warning(
        "Boundedness of %s decided from samples only",
        name or f.expr.kind,
        extra={"window": [t1, t2], "tail_slope": slope, "inf": lo, "sup": hi},
    )
    return Boundedness(bool(bounded_above), bounded_below_positive, "sampled", lo, hi, slope)


def scaled(f: CoefficientFn, k: float) -> CoefficientFn:
    """Multiply by a positive constant, folding constants and scaling declared bounds."""
    if not k > 0:
        raise ValueError(f"scale factor must be positive, got {k}")
    if k == 1.0:
        return f
    bounds = None
    if f.declared_bounds is not None:
        bounds = (f.declared_bounds[0] * k, f.declared_bounds[1] * k)
    if isinstance(f.expr, Const):
        return CoefficientFn(Const(f.expr.c * k), bounds, f.domain_start)
    if isinstance(f.expr, Prod) and isinstance(f.expr.factors[0], Const):
        head = Const(f.expr.factors[0].c * k)
        return CoefficientFn(Prod((head, *f.expr.factors[1:])), bounds, f.domain_start)
    return CoefficientFn(Prod((Const(k), f.expr)), bounds, f.domain_start)

"""JSON expression trees for coefficient functions (node kind + children)."""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

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
    Rational,
    Sum,
    Table,
    TPow,
)


class ExprBase(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # only meaningful on the root node of a coefficient
    bounds: tuple[float, float] | None = None
    domain_start: float | None = None


class ConstExpr(ExprBase):
    kind: Literal["const"]
    value: float


class TPowExpr(ExprBase):
    kind: Literal["t_pow"]
    eta: float
    scale: float = 1.0
    shift: float = 0.0


class AffineExpr(ExprBase):
    kind: Literal["affine"]
    slope: float
    intercept: float


class RationalExpr(ExprBase):
    kind: Literal["rational"]
    num: list[float] = Field(min_length=1)
    den: list[float] = Field(default_factory=lambda: [1.0], min_length=1)


class ExpExpr(ExprBase):
    kind: Literal["exp"]
    rate: float
    offset: float = 0.0
    scale: float = 1.0


class SumExpr(ExprBase):
    kind: Literal["sum"]
    terms: list[ExprOrNumber] = Field(min_length=1)


class ProdExpr(ExprBase):
    kind: Literal["prod"]
    factors: list[ExprOrNumber] = Field(min_length=1)


class QuotExpr(ExprBase):
    kind: Literal["quot"]
    num: ExprOrNumber
    den: ExprOrNumber


class PiecewiseExpr(ExprBase):
    kind: Literal["piecewise"]
    breaks: list[float]
    pieces: list[ExprOrNumber] = Field(min_length=1)


class TableExpr(ExprBase):
    kind: Literal["table"]
    times: list[float] = Field(min_length=2)
    values: list[float] = Field(min_length=2)


class LagIntegralExpr(ExprBase):
    kind: Literal["lag_integral"]
    coef: ExprOrNumber
    density: ExprOrNumber
    lag: ExprOrNumber


Expr = Annotated[
    Union[
        ConstExpr,
        TPowExpr,
        AffineExpr,
        RationalExpr,
        ExpExpr,
        SumExpr,
        ProdExpr,
        QuotExpr,
        PiecewiseExpr,
        TableExpr,
        LagIntegralExpr,
    ],
    Field(discriminator="kind"),
]
ExprOrNumber = Union[float, Expr]

for _model in (SumExpr, ProdExpr, QuotExpr, PiecewiseExpr, LagIntegralExpr):
    _model.model_rebuild()

expr_adapter: TypeAdapter = TypeAdapter(ExprOrNumber)


def node_from_model(model: ExprOrNumber) -> Node:
    if isinstance(model, (int, float)):
        return Const(float(model))
    match model:
        case ConstExpr():
            return Const(model.value)
        case TPowExpr():
            return TPow(model.eta, model.scale, model.shift)
        case AffineExpr():
            return Affine(model.slope, model.intercept)
        case RationalExpr():
            return Rational(tuple(model.num), tuple(model.den))
        case ExpExpr():
            return Exp(model.rate, model.offset, model.scale)
        case SumExpr():
            return Sum(tuple(node_from_model(term) for term in model.terms))
        case ProdExpr():
            return Prod(tuple(node_from_model(factor) for factor in model.factors))
        case QuotExpr():
            return Quot(node_from_model(model.num), node_from_model(model.den))
        case PiecewiseExpr():
            return Piecewise(tuple(model.breaks), tuple(node_from_model(p) for p in model.pieces))
        case TableExpr():
            return Table(tuple(model.times), tuple(model.values))
        case LagIntegralExpr():
            return LagIntegral(
                node_from_model(model.coef), node_from_model(model.density), node_from_model(model.lag)
            )
    raise TypeError(f"unknown expression model {type(model).__name__}")


def fn_from_model(model: ExprOrNumber, default_start: float = 0.0) -> CoefficientFn:
    node = node_from_model(model)
    if isinstance(model, (int, float)):
        c = float(model)
        return CoefficientFn(node, (c, c), default_start)
    bounds = model.bounds
    if bounds is None and isinstance(node, Const):
        bounds = (node.c, node.c)
    start = model.domain_start if model.domain_start is not None else default_start
    return CoefficientFn(node, bounds, start)


def fn_from_json(data, default_start: float = 0.0) -> CoefficientFn:
    """Validate a JSON value (number or expression object) and build the coefficient."""
    return fn_from_model(expr_adapter.validate_python(data), default_start)


def node_to_json(node: Node) -> dict | float:
    match node:
        case Const():
            return node.c
        case TPow():
            return {"kind": "t_pow", "eta": node.eta, "scale": node.scale, "shift": node.shift}
        case Affine():
            return {"kind": "affine", "slope": node.slope_coef, "intercept": node.intercept}
        case Rational():
            return {"kind": "rational", "num": list(node.num), "den": list(node.den)}
        case Exp():
            return {"kind": "exp", "rate": node.rate, "offset": node.offset, "scale": node.scale}
        case Sum():
            return {"kind": "sum", "terms": [node_to_json(term) for term in node.terms]}
        case Prod():
            return {"kind": "prod", "factors": [node_to_json(factor) for factor in node.factors]}
        case Quot():
            return {"kind": "quot", "num": node_to_json(node.num), "den": node_to_json(node.den)}
        case Piecewise():
            return {
                "kind": "piecewise",
                "breaks": list(node.breaks),
                "pieces": [node_to_json(piece) for piece in node.pieces],
            }
        case Table():
            return {"kind": "table", "times": list(node.times), "values": list(node.values)}
        case LagIntegral():
            return {
                "kind": "lag_integral",
                "coef": node_to_json(node.coef),
                "density": node_to_json(node.density),
                "lag": node_to_json(node.lag),
            }
    raise TypeError(f"cannot serialize node {type(node).__name__}")


def fn_to_json(f: CoefficientFn) -> dict | float:
    """Plain constants serialize as numbers; everything else as a tagged object."""
    out = node_to_json(f.expr)
    trivial_bounds = isinstance(f.expr, Const) and f.declared_bounds in (None, (f.expr.c, f.expr.c))
    if isinstance(out, float):
        if trivial_bounds and f.domain_start == 0.0:
            return out
        out = {"kind": "const", "value": out}
    if f.declared_bounds is not None and not trivial_bounds:
        out["bounds"] = list(f.declared_bounds)
    if f.domain_start != 0.0:
        out["domain_start"] = f.domain_start
    return out

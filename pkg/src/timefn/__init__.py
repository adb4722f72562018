__all__ = [
    "CoefficientFn",
    "Boundedness",
    "as_fn",
    "const",
    "t_pow",
    "affine",
    "rational",
    "exp_fn",
    "piecewise",
    "table",
    "lag_integral",
    "evaluate",
    "derivative",
    "slope_or_difference",
    "sampled_bounds",
    "derived_bounds",
    "boundedness",
    "scaled",
    "fn_from_json",
    "fn_to_json",
]

from src.timefn.bounds import Boundedness, boundedness, derived_bounds, sampled_bounds, scaled
from src.timefn.codec import fn_from_json, fn_to_json
from src.timefn.coefficient import (
    CoefficientFn,
    affine,
    as_fn,
    const,
    derivative,
    evaluate,
    exp_fn,
    lag_integral,
    piecewise,
    rational,
    slope_or_difference,
    t_pow,
    table,
)

import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.errors import DomainError, InconsistentBoundsError, NonFiniteError
from src.timefn import (
    affine,
    boundedness,
    const,
    derivative,
    derived_bounds,
    evaluate,
    exp_fn,
    fn_from_json,
    fn_to_json,
    lag_integral,
    piecewise,
    rational,
    sampled_bounds,
    scaled,
    slope_or_difference,
    t_pow,
    table,
)


def test_basic_nodes():
    assert evaluate(t_pow(2.0), 3.0) == pytest.approx(9.0)
    assert evaluate(affine(2.0, 1.0), 4.0) == pytest.approx(9.0)
    assert evaluate(rational([1.0], [2.0, 1.0]), 2.0) == pytest.approx(0.25)
    assert evaluate(exp_fn(-1.0), 0.0) == pytest.approx(1.0)
    np.testing.assert_allclose(evaluate(table([0.0, 2.0], [0.0, 4.0]), np.array([1.0, 3.0])), [2.0, 4.0])


def test_operators_build_trees_and_fold_constants():
    f = (t_pow(1.0) + 2.0) * 3.0
    assert evaluate(f, 4.0) == pytest.approx(18.0)
    folded = const(2.0) + const(3.0)
    assert folded.is_constant
    assert folded.declared_bounds == (5.0, 5.0)
    assert evaluate(1.0 / (t_pow(1.0) + 1.0), 1.0) == pytest.approx(0.5)
    assert evaluate(-t_pow(1.0), 2.0) == pytest.approx(-2.0)


def test_domain_start_is_enforced():
    f = t_pow(1.0).with_domain(1.0)
    with pytest.raises(DomainError):
        evaluate(f, 0.5)
    assert evaluate(f, 0.5, check_domain=False) == pytest.approx(0.5)


def test_non_finite_values_raise():
    with pytest.raises(NonFiniteError):
        evaluate(rational([1.0], [0.0, 1.0]), 0.0)


def test_exact_derivative():
    f = rational([1.0], [2.0, 1.0])
    t = np.array([0.0, 1.0, 10.0])
    np.testing.assert_allclose(derivative(f, t), -1.0 / (t + 2.0) ** 2, rtol=1e-12)
    g = t_pow(2.0) * exp_fn(-1.0)
    assert derivative(g, 1.0) == pytest.approx((2.0 - 1.0) * math.exp(-1.0))


def test_piecewise_has_no_exact_derivative():
    f = piecewise([1.0], [t_pow(1.0), 1.0])
    assert derivative(f, 0.5) is None
    assert slope_or_difference(f, 0.5) == pytest.approx(1.0, rel=1e-6)
    assert evaluate(f, 2.0) == pytest.approx(1.0)


def test_lag_integral_against_closed_form():
    f = lag_integral(1.0, exp_fn(1.0), 1.0)
    for t in (0.0, 1.5, 3.0):
        assert evaluate(f, t) == pytest.approx(math.exp(t) - math.exp(t - 1.0), rel=1e-10)
    assert evaluate(lag_integral(2.0, 0.5, 1.0), 7.0) == pytest.approx(1.0)


def test_derived_bounds():
    assert derived_bounds(exp_fn(-1.0)) == pytest.approx((0.0, 1.0))
    lo, hi = derived_bounds(t_pow(1.0) + 1.0)
    assert lo == pytest.approx(1.0) and math.isinf(hi)
    assert derived_bounds(rational([0.0, 1.0], [1.0, 1.0])) is None
    assert derived_bounds(affine(1.0, 0.0).with_bounds(0.0, 5.0)) == (0.0, 5.0)


def test_derived_bounds_when_the_power_base_changes_sign():
    # (t - 5)^2 + 0.1 reaches 0.1 at t = 5
    lo, hi = derived_bounds(t_pow(2.0, shift=-5.0) + 0.1)
    assert lo == pytest.approx(0.1) and math.isinf(hi)
    lo, hi = derived_bounds(t_pow(2.0, scale=-1.0, shift=-5.0))
    assert math.isinf(lo) and hi == 0.0
    lo, hi = derived_bounds(t_pow(3.0, shift=-2.0))
    assert lo == pytest.approx(-8.0) and math.isinf(hi)
    assert derived_bounds(t_pow(0.5, shift=-1.0)) is None
    lo, _ = derived_bounds(t_pow(2.0, shift=1.0))
    assert lo == pytest.approx(1.0)


def test_boundedness_sampled_tail():
    saturating = boundedness(rational([0.0, 1.0], [1.0, 1.0]), (1.0, 1e4), 200, "t/(t+1)")
    assert saturating.source == "sampled"
    assert saturating.bounded_above and saturating.bounded_below_positive

    growing = boundedness(rational([0.0, 0.0, 1.0], [1.0, 1.0]), (1.0, 1e4), 200)
    assert not growing.bounded_above

    derived = boundedness(t_pow(0.5), (1.0, 1e4), 200)
    assert derived.source == "derived" and not derived.bounded_above


def test_sampled_bounds_detect_inconsistent_declarations():
    assert sampled_bounds(affine(1.0, 0.0), (0.0, 10.0), 11) == pytest.approx((0.0, 10.0))
    with pytest.raises(InconsistentBoundsError):
        sampled_bounds(affine(1.0, 0.0).with_bounds(0.0, 1.0), (0.0, 10.0), 11)
    with pytest.raises(ValueError):
        sampled_bounds(affine(1.0, 0.0), (2.0, 1.0), 11)


def test_scaled_keeps_bounds():
    f = scaled(const(2.0), 3.0)
    assert evaluate(f, 0.0) == pytest.approx(6.0)
    assert f.declared_bounds == (6.0, 6.0)
    with pytest.raises(ValueError):
        scaled(const(2.0), 0.0)


@hsettings(max_examples=50, deadline=None)
@given(
    k=st.floats(min_value=1e-3, max_value=1e3),
    t=st.floats(min_value=0.0, max_value=100.0),
)
def test_scaling_multiplies_values(k, t):
    f = t_pow(0.5, 2.0, 1.0) + exp_fn(-0.1)
    assert evaluate(scaled(f, k), t) == pytest.approx(k * evaluate(f, t), rel=1e-12)


def test_codec_keeps_constants_plain_and_trees_tagged():
    assert fn_to_json(const(2.0)) == 2.0
    f = (t_pow(1.0, shift=2.0) * exp_fn(-0.5)).with_domain(1.0)
    data = fn_to_json(f)
    assert data["kind"] == "prod" and data["domain_start"] == 1.0
    g = fn_from_json(data)
    assert g.domain_start == 1.0
    times = np.linspace(1.0, 20.0, 7)
    np.testing.assert_array_equal(evaluate(g, times), evaluate(f, times))


def test_codec_rejects_unknown_kinds():
    with pytest.raises(ValueError):
        fn_from_json({"kind": "spline", "knots": [0, 1]})

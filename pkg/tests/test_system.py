import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.errors import EnvelopeError, ModelConstraintError, NegativeHistoryError
from src.models import example_3_2, mackey_glass_system, nicholson_system
from src.system import (
    ClampedPower,
    Density,
    FunctionHistory,
    LinearTerm,
    MackeyGlass,
    Nicholson,
    WindowClamp,
    WindowMinBirth,
    build_cooperative_lower,
    has_linear_delays,
    kernel_mass,
    lag_point,
    lower_envelope,
    make_system,
    nonlinearity_eval,
    rhs_eval,
    scale_system,
    uniform,
    upper_envelope,
)
from src.timefn import affine, const, evaluate, t_pow

positive = st.floats(min_value=0.0, max_value=5.0)
weights = st.floats(min_value=0.1, max_value=10.0)


def test_nicholson_equilibria_are_rest_points(two_patch, scalar, constant_history):
    x = math.log(8.0 / 3.0)
    assert np.max(np.abs(rhs_eval(two_patch.spec, 5.0, constant_history(x, x)))) <= 1e-12
    y = math.log(2.0)
    assert abs(rhs_eval(scalar.spec, 5.0, constant_history(y))[0]) <= 1e-12


@hsettings(max_examples=40, deadline=None)
@given(x1=positive, x2=positive, t=st.floats(min_value=0.0, max_value=50.0))
def test_births_and_coupling_are_nonnegative(two_patch, x1, x2, t):
    spec = two_patch.spec
    hist = FunctionHistory([const(x1), const(x2)])
    rhs = rhs_eval(spec, t, hist)
    decay = np.array([evaluate(d, t) for d in spec.decay])
    assert np.all(rhs >= -decay * np.array([x1, x2]) - 1e-12)


def test_negative_history_is_rejected(scalar, constant_history):
    with pytest.raises(NegativeHistoryError):
        rhs_eval(scalar.spec, 2.0, constant_history(-0.5))


def test_kernel_mass_is_one():
    for kernel in (uniform(0.5), Density(const(2.0), const(0.5)), lag_point(1.0)):
        for t in (0.0, 3.0, 40.0):
            assert kernel_mass(kernel, t) == pytest.approx(1.0, abs=1e-8)


def test_density_must_be_normalized():
    with pytest.raises(ModelConstraintError):
        Density(const(1.0), const(0.5))


def test_standing_constraints():
    with pytest.raises(ModelConstraintError):
        make_system([1.0], [[LinearTerm(const(0.5), lag_point(2.0))]], tau=1.0)
    with pytest.raises(ModelConstraintError):
        make_system([affine(-1.0, 1.0)])
    with pytest.raises(ModelConstraintError):
        make_system([1.0], [[LinearTerm(const(-0.5))]])
    with pytest.raises(ModelConstraintError):
        MackeyGlass(const(1.0), 0.5)


def test_tau_defaults_to_largest_lag(two_patch):
    assert two_patch.spec.tau == pytest.approx(1.0)
    assert not has_linear_delays(two_patch.spec)
    assert has_linear_delays(example_3_2().spec)


def test_distributed_birth_time_argument():
    c = affine(1.0, 1.0)
    kwargs = dict(d=[1.0], b=[[1.0]], c=[[c]], lags=[[1.0]], lam=[[1.0]])
    inner = nicholson_system(evaluation_time="s", **kwargs)
    outer = nicholson_system(evaluation_time="t", **kwargs)
    hist = FunctionHistory([const(1.0)])
    t = 2.0
    assert nonlinearity_eval(inner.birth[0], t, hist, 0) == pytest.approx(math.exp(-2.0) - math.exp(-3.0), rel=1e-9)
    assert nonlinearity_eval(outer.birth[0], t, hist, 0) == pytest.approx(math.exp(-3.0), rel=1e-9)


def test_lower_envelope_is_normalized(two_patch):
    for env in lower_envelope(two_patch.spec):
        assert env.gain == pytest.approx(1.0)
        for x in (1e-3, 1e-5, 1e-7):
            assert env.h_normalized(x) / x == pytest.approx(1.0, abs=1e-2)


def test_envelope_needs_bounded_shape_coefficients():
    spec = mackey_glass_system(d=[1.0], b=[[1.0]], c=[[t_pow(1.0) + 1.0]], lags=[[1.0]], alpha=2.0)
    with pytest.raises(EnvelopeError):
        lower_envelope(spec)


def test_upper_envelope_gains(two_patch):
    _, gains = upper_envelope(two_patch.spec)
    assert gains == (0.0, 0.0)
    spec = mackey_glass_system(d=[1.0], b=[[1.0]], c=[[1.0]], lags=[[1.0]])
    # x / (1 + x) is bounded by 1 as well
    assert upper_envelope(spec)[1] == (0.0,)


def test_clamped_power_gain():
    assert ClampedPower(2.0, 1.0).gain() == 0.0
    assert ClampedPower(1.0, 1.0, 3.0).gain() == 3.0
    assert Nicholson(const(2.0)).monotone_cap() == pytest.approx(0.5)


def test_sup_bound_uses_the_true_coefficient_floor():
    # c(t) = (t - 5)^2 + 0.1 dips to 0.1 at t = 5
    c = t_pow(2.0, shift=-5.0) + 0.1
    assert Nicholson(c).sup_bound() == pytest.approx(1.0 / (math.e * 0.1))
    assert MackeyGlass(c).sup_bound() == pytest.approx(10.0)
    assert math.isinf(Nicholson(t_pow(0.5, shift=-1.0) + 1.0).sup_bound())


@hsettings(max_examples=30, deadline=None)
@given(v1=weights, v2=weights, x1=positive, x2=positive)
def test_scaling_conjugates_the_right_hand_side(two_patch, v1, v2, x1, x2):
    spec = two_patch.spec
    v = np.array([v1, v2])
    scaled = scale_system(spec, v)
    t = 3.0
    full = rhs_eval(spec, t, FunctionHistory([const(x1), const(x2)]))
    hat = rhs_eval(scaled, t, FunctionHistory([const(x1 / v1), const(x2 / v2)]))
    np.testing.assert_allclose(hat, full / v, rtol=1e-10, atol=1e-12)


def test_scaling_round_trip(two_patch):
    v = np.array([0.3, 7.0])
    back = scale_system(scale_system(two_patch.spec, v), 1.0 / v)
    times = np.linspace(0.0, 20.0, 11)
    for i in range(2):
        for j in range(2):
            for a, b in zip(two_patch.spec.linear[i][j], back.linear[i][j]):
                np.testing.assert_allclose(evaluate(b.a, times), evaluate(a.a, times), rtol=1e-14)


def test_cooperative_lower_system(two_patch):
    lower = build_cooperative_lower(two_patch.spec, 0.5, 3.0)
    assert all(isinstance(f, WindowMinBirth) for f in lower.birth)
    shape = lower.birth[0].shape
    assert isinstance(shape, WindowClamp)
    x = np.linspace(0.0, 5.0, 51)
    assert np.all(shape.value(0.0, x) <= x + 1e-15)
    with pytest.raises(EnvelopeError):
        build_cooperative_lower(two_patch.spec, 2.0, 3.0)
    with pytest.raises(ModelConstraintError):
        build_cooperative_lower(two_patch.spec, 0.0, 3.0)

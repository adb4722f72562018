import math

import numpy as np
import pytest

from src.config import Scheme
from src.errors import MaxStepsExceeded, ModelConstraintError, PositivityError, StepBoundError
from src.integrator import (
    IntegrateOptions,
    align_step,
    constant_segment,
    integrate,
    phi_functions,
    step_halving_check,
    window_minima,
)
from src.system import CustomEnvelope, make_system


def _decay():
    """x' = -x"""
    return make_system([1.0], name="decay")


def _pure_delay():
    """x'(t) = -x(t - 1), written as -x + (x(t) - x(t - 1))."""
    birth = CustomEnvelope(lambda t, hist, i: hist.value(i, t) - hist.value(i, t - 1.0), lag=1.0)
    return make_system([1.0], birth=[birth], name="pure-delay")


def _error_at_one(h: float, scheme: Scheme) -> float:
    opts = IntegrateOptions.from_settings(step=h, scheme=scheme)
    traj = integrate(_decay(), constant_segment([1.0]), 1.0, opts)
    return abs(traj.at(1.0)[0] - math.exp(-1.0))


def test_rk4_is_fourth_order():
    errors = [_error_at_one(h, Scheme.RK4) for h in (0.1, 0.05, 0.025)]
    for coarse, fine in zip(errors, errors[1:]):
        assert 8.0 <= coarse / fine <= 32.0


def test_etd4_integrates_pure_decay_exactly():
    assert _error_at_one(0.1, Scheme.ETD4) <= 1e-12


def test_phi_functions_near_zero():
    p1, p2, p3 = phi_functions(np.array([1e-8, -2.0]))
    assert p1[0] == pytest.approx(1.0) and p2[0] == pytest.approx(0.5) and p3[0] == pytest.approx(1.0 / 6.0)
    assert p1[1] == pytest.approx((math.exp(-2.0) - 1.0) / -2.0)


def test_method_of_steps_values():
    opts = IntegrateOptions.from_settings(step=0.01, scheme=Scheme.RK4, positivity_floor=None)
    traj = integrate(_pure_delay(), constant_segment([1.0]), 2.0, opts)
    assert traj.at(1.0)[0] == pytest.approx(0.0, abs=1e-8)
    assert traj.at(2.0)[0] == pytest.approx(-0.5, abs=1e-8)
    # dense output between knots: x(t) = 1 - t on [0, 1]
    assert traj.at(0.505)[0] == pytest.approx(0.495, abs=1e-8)


def test_positivity_monitor():
    opts = IntegrateOptions.from_settings(step=0.01)
    with pytest.raises(PositivityError) as info:
        integrate(_pure_delay(), constant_segment([1.0]), 3.0, opts)
    assert info.value.component == 0
    assert 1.0 <= info.value.time <= 1.5


def test_step_bound(scalar):
    with pytest.raises(StepBoundError):
        integrate(scalar.spec, constant_segment([1.0]), 5.0, IntegrateOptions.from_settings(step=0.5))


def test_max_steps(scalar):
    with pytest.raises(MaxStepsExceeded):
        integrate(scalar.spec, constant_segment([1.0]), 5.0, IntegrateOptions.from_settings(step=0.01, max_steps=10))


def test_initial_value_must_be_positive(scalar):
    with pytest.raises(ModelConstraintError):
        integrate(scalar.spec, constant_segment([0.0]), 5.0)


def test_align_step():
    assert align_step(0.03, [1.0]) == pytest.approx(1.0 / 34.0)
    assert align_step(0.01, [1.0, 0.5]) == pytest.approx(0.01)
    assert align_step(0.01, []) == 0.01
    assert align_step(0.01, [1.0, math.sqrt(2.0)], max_refine=3) == 0.01


def test_step_alignment_is_recorded(scalar):
    traj = integrate(scalar.spec, constant_segment([1.0]), 2.0, IntegrateOptions.from_settings(step=0.03))
    assert traj.stats.aligned
    assert traj.stats.step == pytest.approx(1.0 / 34.0)


def test_dense_output_extrema():
    traj = integrate(_decay(), constant_segment([1.0]), 1.0, IntegrateOptions.from_settings(step=0.01))
    assert traj.window_min(0, 0.0, 1.0) == pytest.approx(math.exp(-1.0), abs=1e-7)
    assert traj.window_max(0, 0.2, 0.7) == pytest.approx(math.exp(-0.2), abs=1e-7)


def test_trajectory_frame(scalar):
    traj = integrate(scalar.spec, constant_segment([1.0]), 1.0, IntegrateOptions.from_settings(step=0.01))
    frame = traj.to_frame()
    assert list(frame.columns) == ["t", "x1"]
    assert len(frame) == 101
    assert frame["t"].iloc[-1] == pytest.approx(1.0)


def test_step_halving_discrepancy(scalar):
    gap = step_halving_check(scalar.spec, constant_segment([0.5]), 10.0, IntegrateOptions.from_settings(step=0.05))
    assert gap <= 1e-5


def test_scalar_nicholson_approaches_equilibrium(scalar):
    traj = integrate(scalar.spec, constant_segment([0.5]), 60.0, IntegrateOptions.from_settings(step=0.02))
    assert traj.at(60.0)[0] == pytest.approx(math.log(2.0), abs=1e-3)
    minima = window_minima(traj, 40.0, 1.0, 5)
    assert np.all(minima > 0.6)


@pytest.mark.slow
@pytest.mark.parametrize("fixture_name", ["ex34", "ex35"])
def test_tracks_closed_form_solutions(request, fixture_name):
    fixture = request.getfixturevalue(fixture_name)
    opts = IntegrateOptions.from_settings(step=1e-3, scheme=fixture.scheme)
    t0 = fixture.spec.domain_start
    traj = integrate(fixture.spec, fixture.initial_segment(), t0 + 50.0, opts)
    times = np.linspace(t0, t0 + 50.0, 101)
    exact = np.array([fixture.exact.values(t) for t in times])
    rel = np.abs(traj.sample(times) - exact) / np.abs(exact)
    assert float(np.max(rel)) <= 1e-3


@pytest.mark.slow
def test_cone_invariance_on_positive_builtins():
    from src.models import BUILTINS

    for name in ("nicholson2patch", "scalar-nicholson", "example3.4", "example3.5", "extinction-demo"):
        fixture = BUILTINS[name]()
        opts = IntegrateOptions.from_settings(step=fixture.step, scheme=fixture.scheme)
        traj = integrate(fixture.spec, fixture.initial_segment(), fixture.spec.domain_start + 30.0, opts)
        assert np.all(traj.states >= 0.0), name

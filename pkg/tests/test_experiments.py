import math

import numpy as np
import pytest

from src.errors import ModelConstraintError
from src.experiments import (
    ExactSolution,
    PermanenceEstimate,
    comparison_check,
    constant_solution,
    decay_rate_fit,
    default_ensemble,
    ensemble_of,
    estimate_permanence,
    extinction_check,
    floor_consistency,
    minima_nondecreasing,
    verify_exact_solution,
)
from src.integrator import IntegrateOptions, constant_segment, integrate
from src.models import BUILTINS
from src.system import LinearTerm, lag_point, make_system
from src.timefn import const


@pytest.mark.parametrize("key", ["example3.1", "example3.4", "example3.5"])
def test_closed_form_solutions_have_tiny_residuals(key):
    fixture = BUILTINS[key]()
    report = verify_exact_solution(fixture.spec, fixture.exact, points=200)
    assert report.method == "analytic"
    assert report.passes(1e-6), report.max_residual


def test_equilibrium_residual(scalar):
    assert verify_exact_solution(scalar.spec, constant_solution([math.log(2.0)]), points=50).passes(1e-12)
    wrong = verify_exact_solution(scalar.spec, constant_solution([1.0]), points=50)
    assert not wrong.passes()
    assert wrong.max_residual == pytest.approx(1.0 - 2.0 * math.exp(-1.0))


def test_solution_must_match_the_system(scalar):
    with pytest.raises(ModelConstraintError):
        verify_exact_solution(scalar.spec, constant_solution([1.0, 1.0]))
    with pytest.raises(ModelConstraintError):
        verify_exact_solution(scalar.spec, ExactSolution(constant_solution([1.0]).components, 5.0))


def test_default_ensemble():
    ensemble = default_ensemble(2, size=6, seed=3)
    assert len(ensemble) == 6
    np.testing.assert_array_equal(ensemble.values[0], [1.0, 1.0])
    assert np.all((ensemble.values >= 1e-3) & (ensemble.values <= 10.0))
    np.testing.assert_array_equal(default_ensemble(2, size=6, seed=3).values, ensemble.values)
    with pytest.raises(ValueError):
        default_ensemble(2, size=0)


def test_empty_ensemble_is_rejected(scalar):
    with pytest.raises(ValueError):
        estimate_permanence(scalar.spec, ensemble_of([]), horizon=10.0)


def test_two_patch_is_empirically_permanent(two_patch):
    opts = IntegrateOptions.from_settings(step=0.05)
    ensemble = default_ensemble(2, size=5, seed=11)
    estimate = estimate_permanence(two_patch.spec, ensemble, horizon=40.0, opts=opts)
    assert estimate.lower_bound_positive
    assert not estimate.partial
    assert estimate.m_min >= 0.1
    assert estimate.M_max <= 3.0
    assert floor_consistency(estimate, [1.0, 1.0])


def test_estimate_is_deterministic(two_patch):
    opts = IntegrateOptions.from_settings(step=0.05)
    ensemble = default_ensemble(2, size=4, seed=5)
    serial = estimate_permanence(two_patch.spec, ensemble, horizon=20.0, opts=opts, max_workers=1)
    pooled = estimate_permanence(two_patch.spec, ensemble, horizon=20.0, opts=opts, max_workers=4)
    assert serial.to_dict() == pooled.to_dict()


def test_floor_consistency():
    estimate = PermanenceEstimate((0.5, 1.0), (2.0, 2.0), 10.0, 3, 20.0, 1, True)
    assert floor_consistency(estimate, [1.0, 2.0])
    assert not floor_consistency(estimate, [1.0, 100.0])
    with pytest.raises(ValueError):
        floor_consistency(estimate, [1.0])


def test_extinction_demo_dies_out():
    fixture = BUILTINS["extinction-demo"]()
    opts = IntegrateOptions.from_settings(step=0.05)
    result = extinction_check(fixture.spec, default_ensemble(1, size=3, seed=2), horizon=20.0, opts=opts)
    assert result.extinct
    assert all(b < a for a, b in zip(result.first, result.second))


def test_two_patch_does_not_die_out(two_patch):
    opts = IntegrateOptions.from_settings(step=0.05)
    result = extinction_check(two_patch.spec, default_ensemble(2, size=2, seed=2), horizon=20.0, opts=opts)
    assert not result.extinct


def test_example_3_4_is_not_persistent():
    fixture = BUILTINS["example3.4"]()
    opts = IntegrateOptions.from_settings(step=0.01, scheme=fixture.scheme)
    estimate = estimate_permanence(fixture.spec, ensemble_of([fixture.initial_segment()]), horizon=40.0, opts=opts)
    # 1 / (t + 2) stays positive on the window but keeps sinking
    assert estimate.m_min > 0
    assert not estimate.lower_bound_positive
    assert estimate.drift[0] < 0.9


@pytest.mark.parametrize("key", ["nicholson2patch", "extinction-demo"])
def test_permanence_and_extinction_are_exclusive(key):
    spec = BUILTINS[key]().spec
    opts = IntegrateOptions.from_settings(step=0.05)
    ensemble = default_ensemble(spec.n, size=3, seed=7)
    estimate = estimate_permanence(spec, ensemble, horizon=40.0, opts=opts)
    result = extinction_check(spec, ensemble, horizon=40.0, opts=opts)
    assert estimate.lower_bound_positive != result.extinct


def test_linear_system_dies_out():
    spec = make_system([1.0], [[LinearTerm(const(0.5), lag_point(1.0))]], name="damped-linear")
    opts = IntegrateOptions.from_settings(step=0.05)
    result = extinction_check(spec, default_ensemble(1, size=3, seed=1), horizon=20.0, opts=opts)
    assert result.extinct
    assert all(b < 0.01 * a for a, b in zip(result.first, result.second))


def test_lower_system_stays_below(two_patch):
    opts = IntegrateOptions.from_settings(step=0.02)
    result = comparison_check(two_patch.spec, 0.5, 3.0, constant_segment([1.0, 1.0]), 20.0, opts)
    assert result.max_violation <= 1e-6
    assert len(result.minima) == 20
    assert result.to_dict()["component"] in (1, 2)


def test_minima_nondecreasing():
    assert minima_nondecreasing(np.array([0.1, 0.2, 0.3]), 0.5)
    assert not minima_nondecreasing(np.array([0.3, 0.2, 0.4]), 0.5)
    # once above m, later dips are allowed
    assert minima_nondecreasing(np.array([0.1, 0.6, 0.2]), 0.5)


def test_decay_rate_fit():
    spec = make_system([2.0], name="fast-decay")
    traj = integrate(spec, constant_segment([1.0]), 10.0, IntegrateOptions.from_settings(step=0.01))
    fit = decay_rate_fit(traj, (2.0, 10.0), points=50)
    assert fit.rate == pytest.approx(2.0, rel=1e-4)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        decay_rate_fit(traj, (5.0, 5.0))


@pytest.mark.slow
def test_two_patch_fifty_member_ensemble(two_patch):
    opts = IntegrateOptions.from_settings(step=0.05)
    estimate = estimate_permanence(two_patch.spec, default_ensemble(2, size=50, seed=2020), horizon=200.0, opts=opts)
    assert estimate.lower_bound_positive
    assert min(estimate.m_hat) >= 0.1
    assert max(estimate.M_hat) <= 3.0


@pytest.mark.slow
def test_stability_dichotomy():
    unstable = BUILTINS["example3.1"]()
    opts = IntegrateOptions.from_settings(step=0.01, scheme=unstable.scheme)
    traj = integrate(unstable.spec, unstable.initial_segment(), 200.0, opts)
    np.testing.assert_allclose(traj.at(200.0), [1.0, 1.0], atol=1e-2)
    assert decay_rate_fit(traj, (100.0, 200.0)).rate <= 1e-3

    stable = BUILTINS["example3.1-stable"]()
    traj = integrate(stable.spec, stable.initial_segment(), 30.0, IntegrateOptions.from_settings(step=0.01))
    assert decay_rate_fit(traj, (5.0, 30.0)).rate >= 1e-2

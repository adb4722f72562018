import json

import numpy as np
import pytest

from src.errors import ModelConstraintError, SimplexCyclingError
from src.hypotheses import (
    CheckResult,
    Outcome,
    Status,
    VerdictInputs,
    Witness,
    build_report,
    check_sublinear_dissipative,
    grid_times,
    lp_feasible_v,
    margin_profile,
    mmatrix_witness,
    permanence_verdict,
    render_text,
    reverify_witness,
    run_checks,
    sample_matrices,
    simplex_max,
)
from src.models import BUILTINS
from src.system import BirthTerm, KernelBirth, MackeyGlass, lag_point, make_system, scale_system
from src.timefn import const

GRID = {"t_check": 10.0, "t_max": 1e4, "points": 400, "spacing": "geometric"}


def _result(name: str, certified: bool, grid: dict = GRID) -> CheckResult:
    if certified:
        return CheckResult(name, Status.CERTIFIED, Witness(name, (1.0, 1.0), 0.5, "delta", dict(grid)), grid=dict(grid))
    return CheckResult(name, Status.REFUTED, reason="no positive v", grid=dict(grid))


def _inputs(h2=True, h2star=True, h5=True, h5star=True, **flags) -> VerdictInputs:
    values = dict(
        h4_ok=True,
        h4_reason="",
        linear_delays=False,
        a_bounded=True,
        beta_bounded_above=True,
        beta_liminf_positive=True,
        d_liminf_positive=True,
        f_bounded=True,
        h_minus_liminf_positive=True,
    )
    values.update(flags)
    return VerdictInputs(
        h2=_result("H2", h2),
        h2star=_result("H2*", h2star),
        h5=_result("H5", h5),
        h5star=_result("H5*", h5star),
        **values,
    )


def test_simplex_small_program():
    x = simplex_max(np.array([1.0, 1.0]), np.array([[1.0, 2.0], [3.0, 1.0]]), np.array([4.0, 6.0]), 50)
    np.testing.assert_allclose(x, [1.6, 1.2], atol=1e-12)


def test_simplex_guards():
    A, b, c = np.array([[1.0, 2.0], [3.0, 1.0]]), np.array([4.0, 6.0]), np.array([1.0, 1.0])
    with pytest.raises(SimplexCyclingError):
        simplex_max(c, A, b, 0)
    with pytest.raises(ValueError):
        simplex_max(np.array([1.0]), np.array([[-1.0]]), np.array([1.0]), 50)


def test_lp_feasibility():
    found = lp_feasible_v(np.eye(2)[None], 2)
    assert found is not None and found.s > 0
    assert np.max(found.v) == pytest.approx(1.0)
    assert lp_feasible_v(-np.eye(2)[None], 2) is None


def test_mmatrix_witness():
    v, u = mmatrix_witness(np.array([[2.0, -1.0], [-1.0, 2.0]]))
    assert np.all(v > 0) and np.all(u > 0)
    assert mmatrix_witness(np.array([[1.0, -2.0], [-2.0, 1.0]])) is None
    with pytest.raises(ModelConstraintError):
        mmatrix_witness(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_grid_times():
    times = grid_times(10.0, 1e4, 4)
    np.testing.assert_allclose(times, [10.0, 100.0, 1e3, 1e4])
    np.testing.assert_allclose(grid_times(0.0, 3.0, 4), [0.0, 1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        grid_times(5.0, 1.0, 10)


def test_margin_profile_for_unit_vector(two_patch):
    samples = sample_matrices(two_patch.spec)
    np.testing.assert_allclose(margin_profile("H2", samples, [1.0, 1.0]), 0.75)
    np.testing.assert_allclose(margin_profile("H2*", samples, [1.0, 1.0]), 4.0)


def test_two_patch_prefers_unit_witness(two_patch):
    checks = run_checks(sample_matrices(two_patch.spec))
    assert all(result.certified for result in checks.values())
    assert checks["H2"].witness.v == (1.0, 1.0)
    assert checks["H2"].witness.margin == pytest.approx(0.75, rel=1e-6)


@pytest.mark.parametrize("key", sorted(BUILTINS))
def test_builtin_statuses_and_verdicts(key):
    fixture = BUILTINS[key]()
    report = build_report(fixture.spec)
    for name, status in fixture.expected.items():
        assert report.checks[name].status is status, name
    assert report.verdict.outcome is fixture.expected_verdict
    if fixture.expected_blocking is not None:
        assert fixture.expected_blocking in report.verdict.blocking


def test_scaling_keeps_statuses(two_patch):
    base = run_checks(sample_matrices(two_patch.spec))
    scaled = run_checks(sample_matrices(scale_system(two_patch.spec, np.array([0.5, 2.0]))))
    assert {k: r.status for k, r in base.items()} == {k: r.status for k, r in scaled.items()}


def test_witness_survives_refinement(two_patch):
    checks = run_checks(sample_matrices(two_patch.spec, points=50))
    ok, finest = reverify_witness(two_patch.spec, checks["H5"], factor=4)
    assert ok
    assert finest == pytest.approx(checks["H5"].witness.margin, rel=1e-6)
    with pytest.raises(ValueError):
        reverify_witness(two_patch.spec, _result("H2", False))


def test_certified_needs_witness():
    with pytest.raises(ValueError):
        CheckResult("H2", Status.CERTIFIED)


def test_sublinear_dissipative():
    birth = KernelBirth((BirthTerm(const(1.0), MackeyGlass(const(1.0), 1.0), lag_point(1.0)),))
    strong = make_system([3.0], birth=[birth])
    result = check_sublinear_dissipative(strong)
    assert result.certified
    assert result.witness.u == (1.0,)
    weak = make_system([0.5], birth=[birth])
    assert check_sublinear_dissipative(weak).status is Status.REFUTED


def test_corollary_fires_without_linear_delays():
    verdict = permanence_verdict(_inputs())
    assert verdict.outcome is Outcome.PERMANENT
    assert verdict.theorem.startswith("corollary")
    assert verdict.floor_v == (1.0, 1.0)
    assert "m*1" in verdict.floor_form()


def test_envelope_failure_blocks_everything():
    verdict = permanence_verdict(_inputs(h4_ok=False, h4_reason="H4 fails: x1 has no birth term"))
    assert verdict.outcome is Outcome.NO_VERDICT
    assert verdict.blocking == ("H4 fails: x1 has no birth term",)


def test_unbounded_delayed_coupling_blocks():
    verdict = permanence_verdict(_inputs(linear_delays=True, a_bounded=False))
    assert not verdict.fired
    assert "a_ij unbounded with delays in the linear part" in verdict.blocking


def test_unbounded_beta_is_named():
    verdict = permanence_verdict(_inputs(h5star=False, beta_bounded_above=False, f_bounded=True, linear_delays=True))
    assert not verdict.fired
    assert "β unbounded" in verdict.blocking


def test_persistence_without_dissipativity():
    verdict = permanence_verdict(_inputs(h2=False, h2star=False))
    assert verdict.outcome is Outcome.UNIFORMLY_PERSISTENT
    assert "H2 not certified" in verdict.blocking


def test_checks_must_share_a_grid():
    other = dict(GRID, points=10)
    inputs = _inputs()
    mixed = VerdictInputs(**{**inputs.__dict__, "h5": _result("H5", True, other)})
    with pytest.raises(ValueError):
        permanence_verdict(mixed)


def test_report_serializes_and_renders(two_patch):
    report = build_report(two_patch.spec, reverify_factor=2)
    data = json.loads(json.dumps(report.to_dict()))
    assert data["verdict"]["outcome"] == "PERMANENT"
    assert set(data["reverified"]) == {"H2", "H2*", "H5", "H5*"}
    text = render_text(report)
    assert "verdict: PERMANENT" in text
    assert "H4   ok" in text


@pytest.mark.parametrize("key", ["nicholson2patch", "scalar-nicholson", "example3.3", "example3.3-nodelay"])
def test_h5_with_bounded_beta_implies_h5star(key):
    report = build_report(BUILTINS[key]().spec)
    assert report.checks["H5"].certified and report.flags["beta_bounded_above"]
    assert report.checks["H5*"].status is not Status.REFUTED


def test_example_3_3_margins():
    report = build_report(BUILTINS["example3.3"]().spec)
    h5 = report.checks["H5"].witness
    assert h5.v == (1.0, 1.0)
    assert h5.margin == pytest.approx(1.0, rel=1e-6)

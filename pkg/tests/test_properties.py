import numpy as np
import pytest
from hypothesis import assume, given, settings as hsettings, strategies as st
from hypothesis.extra.numpy import arrays

from src.hypotheses import Status, check_H2, lp_feasible_v, margin_profile, mmatrix_witness, sample_matrices
from src.models import nicholson_system
from src.system import FunctionHistory, rhs_eval
from src.timefn import const

entries = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


@hsettings(max_examples=40, deadline=None)
@given(off=arrays(float, (3, 3), elements=st.floats(min_value=0.0, max_value=1.0)), slack=st.floats(0.1, 2.0))
def test_diagonally_dominant_z_matrices_have_witnesses(off, slack):
    np.fill_diagonal(off, 0.0)
    N = np.diag(off.sum(axis=1) + slack) - off
    v, u = mmatrix_witness(N)
    assert np.all(v > 0) and np.all(u > 0)
    np.testing.assert_allclose(u, N @ v)


@hsettings(max_examples=40, deadline=None)
@given(rows=arrays(float, (4, 2, 2), elements=entries))
def test_lp_witness_is_sound(rows):
    found = lp_feasible_v(rows, 2)
    if found is None:
        return
    assert np.all(found.v > 0) and np.max(found.v) == pytest.approx(1.0)
    assert np.min(rows.reshape(-1, 2) @ found.v) >= -1e-9


@hsettings(max_examples=15, deadline=None)
@given(
    d=st.floats(0.5, 3.0),
    a12=st.floats(0.0, 1.0),
    a21=st.floats(0.0, 1.0),
)
def test_h2_witness_is_checked_pointwise(d, a12, a21):
    assume(abs(d * d - a12 * a21) > 1e-3)
    spec = nicholson_system(
        d=[d, d], b=[[2.0], [2.0]], c=[[1.0], [1.0]], lags=[[1.0], [1.0]], a=[[None, a12], [a21, None]]
    )
    samples = sample_matrices(spec, points=20)
    result = check_H2(samples)
    # [D - A] is an M-matrix exactly when d^2 > a12 a21
    assert result.certified == (d * d > a12 * a21)
    if result.status is Status.CERTIFIED:
        profile = margin_profile("H2", samples, result.witness.v)
        assert np.min(profile) >= result.witness.margin - 1e-12


@hsettings(max_examples=30, deadline=None)
@given(values=st.lists(st.floats(0.0, 20.0), min_size=2, max_size=2), t=st.floats(0.0, 100.0))
def test_rhs_is_finite_on_the_cone(two_patch, values, t):
    rhs = rhs_eval(two_patch.spec, t, FunctionHistory([const(v) for v in values]))
    assert np.all(np.isfinite(rhs))

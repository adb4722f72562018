import json

import numpy as np
import pytest

from src.cli.spec_file import fixture_to_dict, parse_spec
from src.errors import ModelConstraintError
from src.hypotheses import Outcome
from src.models import (
    BUILTINS,
    builtin_names,
    example_3_1,
    example_3_3,
    example_3_4,
    example_3_5,
    example_fixture,
    get_builtin,
)
from src.system import FunctionHistory, rhs_eval
from src.timefn import const


def test_registry_names():
    assert builtin_names() == sorted(BUILTINS)
    assert "nicholson2patch" in builtin_names()
    assert get_builtin("builtin:example3.4").key == "example3.4"
    with pytest.raises(ModelConstraintError, match="unknown builtin"):
        get_builtin("example9.9")


def test_registry_keys_match_fixture_keys():
    for key, build in BUILTINS.items():
        fixture = build()
        assert fixture.key == key
        assert fixture.spec.name == key


def test_nodelay_variant():
    fixture = get_builtin("example3.3-nodelay")
    assert fixture.expected_verdict is Outcome.PERMANENT
    assert fixture.expected_blocking is None
    assert example_3_3().expected_blocking == "a_ij unbounded with delays in the linear part"


@pytest.mark.parametrize(
    "build, params",
    [
        (example_3_1, {"C": 0.4, "tau": 0.5}),
        (example_3_3, {"beta": 1.0}),
        (example_3_4, {"mu1": 0.6}),
        (example_3_5, {"tau": 1.5}),
    ],
)
def test_parameter_constraints(build, params):
    with pytest.raises(ModelConstraintError):
        build(**params)


def test_example_dispatch():
    assert example_fixture("3.4", C=3.0).params["C"] == 3.0
    with pytest.raises(ModelConstraintError):
        example_fixture("3.9")


def test_closed_forms_start_before_the_domain():
    for build in (example_3_1, example_3_4, example_3_5):
        fixture = build()
        assert fixture.exact.valid_from <= fixture.spec.domain_start - fixture.spec.tau + 1e-12


@pytest.mark.parametrize("key", sorted(BUILTINS))
def test_fixture_survives_the_spec_file(key):
    fixture = BUILTINS[key]()
    data = json.loads(json.dumps(fixture_to_dict(fixture)))
    loaded = parse_spec(data)
    spec, back = fixture.spec, loaded.spec
    assert back.n == spec.n and back.name == spec.name
    assert back.tau == pytest.approx(spec.tau)
    hist = FunctionHistory([const(0.7 + 0.1 * i) for i in range(spec.n)])
    for t in (spec.domain_start + 2.0, spec.domain_start + 17.5):
        np.testing.assert_allclose(rhs_eval(back, t, hist), rhs_eval(spec, t, hist), rtol=1e-12, atol=1e-14)
    assert loaded.hint.step == fixture.step
    assert (loaded.solution is None) == (fixture.exact is None)

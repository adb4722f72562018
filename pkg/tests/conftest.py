import numpy as np
import pytest

from src.models import example_3_4, example_3_5, nicholson_two_patch, scalar_nicholson
from src.system import FunctionHistory
from src.timefn import const


@pytest.fixture(scope="session")
def two_patch():
    return nicholson_two_patch()


@pytest.fixture(scope="session")
def scalar():
    return scalar_nicholson()


@pytest.fixture(scope="session")
def ex34():
    return example_3_4()


@pytest.fixture(scope="session")
def ex35():
    return example_3_5()


@pytest.fixture
def constant_history():
    """History equal to the given constants for all t."""

    def build(*values):
        return FunctionHistory([const(v) for v in values])

    return build


@pytest.fixture
def rng():
    return np.random.default_rng(7)

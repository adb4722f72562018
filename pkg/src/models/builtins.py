from __future__ import annotations

from typing import Callable

from src.errors import ModelConstraintError
from src.models.examples import (
    ModelFixture,
    example_3_1,
    example_3_1_stable,
    example_3_2,
    example_3_3,
    example_3_4,
    example_3_5,
    extinction_demo,
    nicholson_two_patch,
    scalar_nicholson,
)

BUILTINS: dict[str, Callable[[], ModelFixture]] = {
    "nicholson2patch": nicholson_two_patch,
    "example3.1": example_3_1,
    "example3.1-stable": example_3_1_stable,
    "example3.2": example_3_2,
    "example3.3": example_3_3,
    "example3.3-nodelay": lambda: example_3_3(linear_lag=0.0),
    "example3.4": example_3_4,
    "example3.5": example_3_5,
    "scalar-nicholson": scalar_nicholson,
    "extinction-demo": extinction_demo,
}


def builtin_names() -> list[str]:
    return sorted(BUILTINS)


def get_builtin(name: str) -> ModelFixture:
    """Fixture by registry name; a leading "builtin:" is accepted."""
    key = name.removeprefix("builtin:")
    if key not in BUILTINS:
        raise ModelConstraintError(f"unknown builtin {name!r}, choose from {', '.join(builtin_names())}")
    return BUILTINS[key]()

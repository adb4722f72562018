__all__ = [
    "ModelFixture",
    "nicholson_system",
    "mackey_glass_system",
    "example_fixture",
    "example_3_1",
    "example_3_1_stable",
    "example_3_2",
    "example_3_3",
    "example_3_4",
    "example_3_5",
    "nicholson_two_patch",
    "scalar_nicholson",
    "extinction_demo",
    "BUILTINS",
    "builtin_names",
    "get_builtin",
]

from src.models.builtins import BUILTINS, builtin_names, get_builtin
from src.models.examples import (
    ModelFixture,
    example_3_1,
    example_3_1_stable,
    example_3_2,
    example_3_3,
    example_3_4,
    example_3_5,
    example_fixture,
    extinction_demo,
    nicholson_two_patch,
    scalar_nicholson,
)
from src.models.families import mackey_glass_system, nicholson_system

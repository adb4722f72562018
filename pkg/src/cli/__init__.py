__all__ = [
    "SpecFile",
    "RunConfig",
    "LoadedSpec",
    "load_spec",
    "parse_spec",
    "load_solution",
    "spec_to_dict",
    "fixture_to_dict",
    "write_spec",
    "Target",
    "resolve_target",
    "cmd_simulate",
    "cmd_check",
    "cmd_verify",
    "cmd_permanence",
    "build_parser",
    "run",
    "main",
]

from src.cli.app import build_parser, main, run
from src.cli.commands import Target, cmd_check, cmd_permanence, cmd_simulate, cmd_verify, resolve_target
from src.cli.schema import RunConfig, SpecFile
from src.cli.spec_file import (
    LoadedSpec,
    fixture_to_dict,
    load_solution,
    load_spec,
    parse_spec,
    spec_to_dict,
    write_spec,
)

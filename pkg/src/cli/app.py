from __future__ import annotations

import argparse
import sys
from typing import Sequence

from pydantic import ValidationError

from src.cli.commands import (
    EXIT_NUMERIC,
    EXIT_USAGE,
    cmd_check,
    cmd_permanence,
    cmd_simulate,
    cmd_verify,
    export_target,
    resolve_target,
)
from src.cli.schema import RunConfig
from src.config import Scheme
from src.errors import IntegrationError, NegativeHistoryError, ToolkitError, UsageError
from src.logger import logger as log
from src.models import builtin_names


class _Parser(argparse.ArgumentParser):
    """Usage errors raise instead of exiting with argparse's status 2."""

    def error(self, message: str):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    source = p.add_argument_group("system")
    source.add_argument("--spec", type=str, default=None, help="Spec file (JSON, version 1).")
    source.add_argument(
        "--builtin", type=str, default=None, help=f"Built-in fixture: {', '.join(builtin_names())}."
    )
    source.add_argument("--export-spec", type=str, default=None, help="Write the resolved system as a spec file.")
    source.add_argument("--perturb-d", type=float, default=0.0, help="Add a constant to every decay rate d_i.")

    run = p.add_argument_group("run")
    run.add_argument("--horizon", type=float, default=None, help="Integration end time.")
    run.add_argument("--step", type=float, default=None, help="Integrator step h (at most tau/4).")
    run.add_argument("--scheme", type=str, choices=[s.value for s in Scheme], default=None)
    run.add_argument("--tcheck", type=float, default=None, help="Start of the hypothesis grid.")
    run.add_argument("--tmax", type=float, default=None, help="End of the hypothesis grid.")
    run.add_argument("--grid", type=int, default=None, help="Grid points (check) or residual points (verify).")
    run.add_argument("--ensemble", type=int, default=None, help="Ensemble size.")
    run.add_argument("--seed", type=int, default=None, help="Ensemble seed.")
    run.add_argument("--out", type=str, default=None, help="Output directory.")
    run.add_argument("--json", action="store_true", help="Print JSON instead of text.")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = _Parser(prog="dde-permanence", description="Permanence toolkit for nonautonomous delay systems")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    simulate = sub.add_parser("simulate", parents=[common], help="Integrate and write a CSV trajectory.")
    simulate.add_argument("--initial", type=str, default=None, help="Constants 'a,b,...' or a JSON file.")

    check = sub.add_parser("check", parents=[common], help="Certify the hypotheses and report a verdict.")
    check.add_argument("--reverify", type=int, default=None, help="Re-check witnesses on a grid this many times finer.")

    verify = sub.add_parser("verify", parents=[common], help="Residual of a closed-form solution.")
    verify.add_argument("--solution", type=str, default=None, help="Solution file with one expression per component.")
    verify.add_argument("--tol", type=float, default=None, help="Residual tolerance.")

    permanence = sub.add_parser("permanence", parents=[common], help="Ensemble estimate of the permanence bounds.")
    permanence.add_argument("--extinction", action="store_true", help="Also compare sup-norms at H and 2H.")
    return p


def _run_config(args: argparse.Namespace) -> RunConfig:
    values = {
        "t_check": args.tcheck,
        "t_max": args.tmax,
        "points": args.grid,
        "step": args.step,
        "scheme": args.scheme,
        "horizon": args.horizon,
        "ensemble": args.ensemble,
        "seed": args.seed,
        "out_dir": args.out,
        "reverify": getattr(args, "reverify", None),
        "tolerance": getattr(args, "tol", None),
    }
    return RunConfig(json_output=args.json, **{k: v for k, v in values.items() if v is not None})


def run(argv: Sequence[str] | None = None) -> int:
    """Parse, dispatch and map errors to exit codes."""
    try:
        args = build_parser().parse_args(argv)
        rc = _run_config(args)
        target = resolve_target(
            args.spec,
            args.builtin,
            initial=getattr(args, "initial", None),
            solution=getattr(args, "solution", None),
            perturb_d=args.perturb_d,
        )
        if args.export_spec:
            export_target(target, args.export_spec)
        match args.command:
            case "simulate":
                return cmd_simulate(target, rc)
            case "check":
                return cmd_check(target, rc)
            case "verify":
                return cmd_verify(target, rc)
            case "permanence":
                return cmd_permanence(target, rc, extinction=args.extinction)
    except (IntegrationError, NegativeHistoryError) as e:
        log.error(f"Numerical failure: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        print(f"error: {where}: {first['msg']}" if where else f"error: {first['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except (ToolkitError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.cli.schema import IntegratorHint, RunConfig
from src.cli.spec_file import dump_json, load_solution, load_spec, parse_initial, spec_to_dict, write_spec
from src.config import Scheme, settings
from src.errors import UsageError
from src.experiments import (
    ExactSolution,
    default_ensemble,
    estimate_permanence,
    extinction_check,
    verify_exact_solution,
)
from src.hypotheses import build_report, render_text
from src.integrator import IntegrateOptions, constant_segment, integrate
from src.logger import logger as log
from src.models import get_builtin
from src.system.spec import SystemSpec
from src.timefn import CoefficientFn

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_NO_VERDICT = 3
EXIT_VERIFY = 4


@dataclass(frozen=True)
class Target:
    """A system to run, with what its source recommends for running it."""

    label: str
    spec: SystemSpec
    initial: tuple[CoefficientFn, ...] | None = None
    solution: ExactSolution | None = None
    scheme: Scheme | None = None
    step: float | None = None

    def initial_segment(self) -> list[CoefficientFn]:
        if self.initial is not None:
            return list(self.initial)
        if self.solution is not None:
            return list(self.solution.components)
        return constant_segment([1.0] * self.spec.n)

    def to_dict(self) -> dict:
        hint = IntegratorHint(scheme=self.scheme or Scheme.RK4, step=self.step) if self.step is not None else None
        return spec_to_dict(self.spec, self.initial, self.solution, hint)


def _perturbed(spec: SystemSpec, delta: float) -> SystemSpec:
    """Every d_i(t) shifted by the constant delta."""
    return dataclasses.replace(spec, decay=tuple(d + delta for d in spec.decay))


def resolve_target(
    spec_path: str | None = None,
    builtin: str | None = None,
    initial: str | None = None,
    solution: str | None = None,
    perturb_d: float = 0.0,
) -> Target:
    if (spec_path is None) == (builtin is None):
        raise UsageError("give exactly one of --spec and --builtin")
    if builtin is not None:
        fixture = get_builtin(builtin)
        target = Target(
            fixture.key,
            fixture.spec,
            tuple(fixture.initial) or None,
            fixture.exact,
            fixture.scheme,
            fixture.step,
        )
    else:
        loaded = load_spec(spec_path)
        hint = loaded.hint
        target = Target(
            loaded.spec.name or Path(spec_path).stem,
            loaded.spec,
            loaded.initial,
            loaded.solution,
            hint.scheme if hint else None,
            hint.step if hint else None,
        )
    if solution is not None:
        target = dataclasses.replace(target, solution=load_solution(solution))
    if initial is not None:
        target = dataclasses.replace(target, initial=parse_initial(initial, target.spec.n))
    if perturb_d:
        target = dataclasses.replace(target, spec=_perturbed(target.spec, perturb_d))
        log.info("Decay rates perturbed", extra={"system": target.label, "delta": perturb_d})
    return target


def export_target(target: Target, path: str) -> Path:
    return write_spec(path, target.to_dict())


def _options(target: Target, rc: RunConfig) -> IntegrateOptions:
    step = rc.step or target.step or settings.integrator.step
    rc.check_step(step, target.spec.tau)
    return IntegrateOptions.from_settings(step=step, scheme=rc.scheme or target.scheme)


def _emit(rc: RunConfig, payload: dict, text: str, path: Path) -> None:
    dump_json(payload, path)
    print(dump_json(payload) if rc.json_output else text, end="")


def cmd_simulate(target: Target, rc: RunConfig) -> int:
    """Integrate from the target's initial segment, write the CSV and a summary."""
    spec = target.spec
    opts = _options(target, rc)
    if rc.horizon <= spec.domain_start:
        raise UsageError(f"horizon {rc.horizon:g} must exceed the initial time {spec.domain_start:g}")
    traj = integrate(spec, target.initial_segment(), rc.horizon, opts)

    out = Path(rc.out_dir)
    csv_path = out / f"{target.label}_trajectory.csv"
    frame = traj.to_frame(traj.output_grid(opts.step))
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(csv_path, index=False, float_format="%.17g")

    columns = [f"x{i + 1}" for i in range(spec.n)]
    values = frame[columns].to_numpy()
    summary = {
        "system": target.label,
        "n": spec.n,
        "t0": traj.t0,
        "t_end": traj.t_end,
        "step": traj.stats.step,
        "scheme": traj.stats.scheme,
        "steps": traj.stats.steps,
        "rows": len(frame),
        "final": [float(x) for x in traj.at(traj.t_end)],
        "min": [float(x) for x in np.min(values, axis=0)],
        "max": [float(x) for x in np.max(values, axis=0)],
        "csv": str(csv_path),
    }
    text = "\n".join(
        [f"simulated {target.label} on [{traj.t0:g}, {traj.t_end:g}] with h={traj.stats.step:g}"]
        + [
            f"  {c}: final {summary['final'][i]:.10g}  min {summary['min'][i]:.10g}  max {summary['max'][i]:.10g}"
            for i, c in enumerate(columns)
        ]
        + [f"  trajectory: {csv_path}"]
    )
    _emit(rc, summary, text + "\n", out / f"{target.label}_summary.json")
    return EXIT_OK


def cmd_check(target: Target, rc: RunConfig) -> int:
    """Hypothesis report; exit 3 when no theorem applies."""
    report = build_report(target.spec, rc.t_check, rc.t_max, rc.points, rc.reverify)
    _emit(rc, report.to_dict(), render_text(report), Path(rc.out_dir) / f"{target.label}_check.json")
    return EXIT_OK if report.verdict.fired else EXIT_NO_VERDICT


def cmd_verify(target: Target, rc: RunConfig) -> int:
    """Residual of the target's exact solution; exit 4 above the tolerance."""
    if target.solution is None:
        raise UsageError(f"{target.label} has no exact solution, pass --solution")
    report = verify_exact_solution(target.spec, target.solution, points=rc.points)
    ok = report.passes(rc.tolerance)
    payload = {"system": target.label, "tolerance": rc.tolerance, "passed": ok, **report.to_dict()}
    text = (
        f"{target.label}: max residual {report.max_residual:.3e} at t={report.at_time:g} "
        f"({report.method}), tolerance {rc.tolerance:g}: {'ok' if ok else 'FAILED'}\n"
    )
    _emit(rc, payload, text, Path(rc.out_dir) / f"{target.label}_verify.json")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_permanence(target: Target, rc: RunConfig, extinction: bool = False) -> int:
    """Ensemble estimate of m_hat, M_hat; optionally the extinction test at H and 2H."""
    spec = target.spec
    opts = _options(target, rc)
    if rc.horizon <= spec.domain_start:
        raise UsageError(f"horizon {rc.horizon:g} must exceed the initial time {spec.domain_start:g}")
    ensemble = default_ensemble(spec.n, rc.ensemble, rc.seed)
    estimate = estimate_permanence(spec, ensemble, rc.horizon, opts=opts)
    payload = {"system": target.label, "step": opts.step, "scheme": opts.scheme.value, **estimate.to_dict()}

    lines = [f"{target.label}: {len(ensemble)} members, seed {rc.seed}, horizon {rc.horizon:g}"]
    for i, (m, M) in enumerate(zip(estimate.m_hat, estimate.M_hat)):
        lines.append(f"  x{i + 1}: m_hat {m:.6g}  M_hat {M:.6g}")
    lines.append(f"  lower bound positive: {estimate.lower_bound_positive}")
    if estimate.partial:
        lines.append(f"  failed members: {len(estimate.failures)}")

    if extinction:
        result = extinction_check(spec, ensemble, rc.horizon, opts)
        payload["extinction"] = result.to_dict()
        lines.append(f"  extinct: {result.extinct}")

    _emit(rc, payload, "\n".join(lines) + "\n", Path(rc.out_dir) / f"{target.label}_permanence.json")
    if len(estimate.failures) == len(ensemble):
        log.error("Every ensemble member failed", extra={"system": target.label})
        return EXIT_NUMERIC
    return EXIT_OK

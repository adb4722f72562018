from __future__ import annotations

from dataclasses import dataclass, field

from src.hypotheses.checks import (
    CheckResult,
    check_sublinear_dissipative,
    ratio_diagnostics,
    reverify_witness,
    run_checks,
)
from src.hypotheses.samples import sample_matrices
from src.hypotheses.verdict import Verdict, gather_inputs, permanence_verdict
from src.logger import logger as log
from src.system.spec import SystemSpec


@dataclass
class HypothesisReport:
    system: str
    n: int
    grid: dict
    checks: dict[str, CheckResult]
    dissipative: CheckResult
    h4: dict
    flags: dict
    boundedness: dict
    ratios: dict
    verdict: Verdict
    # hypothesis -> (kept half margin, finest margin) on the refined grid
    reverified: dict[str, tuple[bool, float]] = field(default_factory=dict)

    @property
    def statuses(self) -> dict[str, str]:
        return {name: result.status.value for name, result in self.checks.items()}

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "n": self.n,
            "grid": dict(self.grid),
            "checks": {name: result.to_dict() for name, result in self.checks.items()},
            "dissipative": self.dissipative.to_dict(),
            "H4": dict(self.h4),
            "flags": dict(self.flags),
            "boundedness": self.boundedness,
            "ratio_diagnostics": self.ratios,
            "verdict": self.verdict.to_dict(),
            "reverified": {name: {"ok": ok, "finest_margin": m} for name, (ok, m) in self.reverified.items()},
        }


def build_report(
    sys: SystemSpec,
    t_check: float | None = None,
    t_max: float | None = None,
    points: int | None = None,
    reverify_factor: int | None = None,
) -> HypothesisReport:
    """Sample once, run every check and the verdict on that grid."""
    samples = sample_matrices(sys, t_check, t_max, points)
    checks = run_checks(samples)
    dissipative = check_sublinear_dissipative(sys, samples=samples)
    inputs, detail = gather_inputs(sys, samples, checks)
    verdict = permanence_verdict(inputs)

    reverified: dict[str, tuple[bool, float]] = {}
    if reverify_factor:
        for name, result in checks.items():
            if result.certified:
                reverified[name] = reverify_witness(sys, result, reverify_factor)

    flags = inputs.flags()
    h4 = {"ok": flags.pop("h4_ok"), "reason": flags.pop("h4_reason")}
    log.info(
        "Hypothesis report built",
        extra={"system": sys.name, "outcome": verdict.outcome.value, "blocking": list(verdict.blocking)},
    )
    return HypothesisReport(
        system=sys.name,
        n=sys.n,
        grid=dict(samples.grid),
        checks=checks,
        dissipative=dissipative,
        h4=h4,
        flags=flags,
        boundedness=detail,
        ratios=ratio_diagnostics(samples),
        verdict=verdict,
        reverified=reverified,
    )


def _margin(result: CheckResult) -> str:
    if result.witness is None:
        return ""
    w = result.witness
    v = ", ".join(f"{x:.6g}" for x in w.v)
    return f" {w.margin_kind}={w.margin:.6g} v=({v})"


def render_text(report: HypothesisReport) -> str:
    grid = report.grid
    lines = [
        f"system: {report.system or '<unnamed>'} (n={report.n})",
        f"grid: [{grid['t_check']:g}, {grid['t_max']:g}] x {grid['points']} ({grid['spacing']})",
        "",
    ]
    for name, result in report.checks.items():
        line = f"  {name:<4} {result.status.value}{_margin(result)}"
        if result.reason:
            line += f"  [{result.reason}]"
        lines.append(line)
    line = f"  {'dissipative':<4} {report.dissipative.status.value}{_margin(report.dissipative)}"
    if report.dissipative.reason:
        line += f"  [{report.dissipative.reason}]"
    lines.append(line)
    lines.append(f"  H4   {'ok' if report.h4['ok'] else report.h4['reason']}")
    for name, (ok, finest) in report.reverified.items():
        lines.append(f"  refined grid {name}: {'kept' if ok else 'LOST'} margin ({finest:.6g})")
    lines.append("")
    flags = ", ".join(f"{k}={v}" for k, v in report.flags.items())
    lines.append(f"flags: {flags}")
    lines.append("")
    verdict = report.verdict
    lines.append(f"verdict: {verdict.outcome.value}")
    if verdict.theorem:
        lines.append(f"  via {verdict.theorem} ({verdict.branch})")
    if verdict.floor_v is not None and verdict.fired:
        lines.append(f"  {verdict.floor_form()}")
    for reason in verdict.blocking:
        lines.append(f"  blocked: {reason}")
    for note in verdict.notes:
        lines.append(f"  note: {note}")
    return "\n".join(lines) + "\n"

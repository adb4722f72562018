"""
Grid certificates for the dissipativity and persistence hypotheses.

"t >> 1" means "at every point of the sampling grid"; a certified status is
grid evidence, never a proof, and carries the grid it was obtained on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from src.config import settings
from src.errors import ModelConstraintError, SimplexCyclingError
from src.hypotheses.samples import MatrixSamples, refine, sample_matrices
from src.hypotheses.simplex import LPResult, lp_feasible_v
from src.logger import logger as log
from src.system.envelope import upper_envelope
from src.system.spec import SystemSpec
from src.timefn import CoefficientFn, evaluate


class Status(str, Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted-on-grid"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Witness:
    hypothesis: str
    v: tuple[float, ...]
    # delta for the additive forms, alpha for the ratio forms
    margin: float
    margin_kind: str
    grid: dict
    u: tuple[float, ...] | None = None

    def to_dict(self) -> dict:
        out = {
            "hypothesis": self.hypothesis,
            "v": list(self.v),
            "margin": self.margin,
            "margin_kind": self.margin_kind,
            "grid": dict(self.grid),
        }
        if self.u is not None:
            out["u"] = list(self.u)
        return out


@dataclass(frozen=True)
class CheckResult:
    hypothesis: str
    status: Status
    witness: Witness | None = None
    reason: str = ""
    tail_slope: float | None = None
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status is Status.CERTIFIED and self.witness is None:
            raise ValueError("a certified status needs a witness")

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    def to_dict(self) -> dict:
        return {
            "hypothesis": self.hypothesis,
            "status": self.status.value,
            "witness": self.witness.to_dict() if self.witness else None,
            "reason": self.reason,
            "tail_slope": self.tail_slope,
            "grid": dict(self.grid),
        }


@dataclass(frozen=True)
class _Form:
    """rows(m) = num - m * den; additive forms use den = I."""

    name: str
    kind: str
    num: Callable[[MatrixSamples], np.ndarray]
    den: Callable[[MatrixSamples], np.ndarray]


def _identity(s: MatrixSamples) -> np.ndarray:
    return np.broadcast_to(np.eye(s.n), s.D.shape)


FORMS = {
    "H2": _Form("H2", "delta", lambda s: s.D - s.A, _identity),
    "H5": _Form("H5", "delta", lambda s: s.M, _identity),
    "H2*": _Form("H2*", "alpha", lambda s: s.D, lambda s: s.A),
    "H5*": _Form("H5*", "alpha", lambda s: s.B, lambda s: s.D - s.A),
}


def margin_profile(hypothesis: str, samples: MatrixSamples, v: Sequence[float]) -> np.ndarray:
    """
    Largest margin per grid point for the fixed vector v.

    delta_k = min_i (N_k v)_i / v_i, alpha_k = min_i (num_k v)_i / (den_k v)_i over (den_k v)_i > 0.
    """
    form = FORMS[hypothesis]
    v = np.asarray(v, dtype=float)
    top = form.num(samples) @ v
    bottom = form.den(samples) @ v
    if form.kind == "delta":
        return np.min(top / v, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bottom > 0, top / bottom, np.inf)
    return np.minimum(np.min(ratio, axis=1), settings.grid.alpha_cap)


def _feasible(rows: np.ndarray, n: int) -> LPResult | None:
    return lp_feasible_v(rows, n, normalize=True)


def _prefer_ones(hypothesis: str, samples: MatrixSamples, v: np.ndarray) -> np.ndarray:
    """Keep the unit vector whenever it certifies at least as large a margin as v."""
    ones = np.ones(samples.n)
    if np.min(margin_profile(hypothesis, samples, ones)) >= np.min(margin_profile(hypothesis, samples, v)):
        return ones
    return v


def _tail_slope(times: np.ndarray, margins: np.ndarray) -> float | None:
    half = len(times) // 2
    t, m = times[half:], margins[half:]
    keep = np.isfinite(m)
    t, m = t[keep], m[keep]
    if len(m) < 2:
        return None
    if np.any(m <= 0):
        return -math.inf
    if np.all(m == m[0]):
        return 0.0
    return float(np.polyfit(np.log(t), np.log(m), 1)[0])


def _finish(hypothesis: str, samples: MatrixSamples, v: np.ndarray) -> CheckResult:
    cfg = settings.grid
    form = FORMS[hypothesis]
    v = _prefer_ones(hypothesis, samples, v)
    profile = margin_profile(hypothesis, samples, v)
    margin = float(np.min(profile))
    excess = profile if form.kind == "delta" else profile - 1.0
    if form.kind == "delta" and margin <= 0:
        return CheckResult(hypothesis, Status.REFUTED, reason="feasible only at delta = 0", grid=samples.grid)
    if form.kind == "alpha" and margin < 1.0 + cfg.alpha_margin:
        return CheckResult(hypothesis, Status.REFUTED, reason="no alpha > 1 on the grid", grid=samples.grid)

    witness = Witness(hypothesis, tuple(float(x) for x in v), margin, form.kind, dict(samples.grid))
    slope = _tail_slope(samples.times, excess)
    if slope is not None and slope < cfg.vanishing_slope:
        log.info(
            "Certificate downgraded, margin vanishes along the grid",
            extra={"hypothesis": hypothesis, "tail_slope": slope, "margin": margin},
        )
        return CheckResult(
            hypothesis,
            Status.UNDECIDED,
            witness,
            reason=f"vanishing margin (tail log-log slope {slope:.3g})",
            tail_slope=slope,
            grid=samples.grid,
        )
    log.info("Hypothesis certified on grid", extra={"hypothesis": hypothesis, "margin": margin, "v": list(v)})
    return CheckResult(hypothesis, Status.CERTIFIED, witness, tail_slope=slope, grid=samples.grid)


def _delta_ceiling(rows: np.ndarray) -> float:
    """Upper bound on a feasible delta: row i with v_i = 1 and 0 < v_j <= 1."""
    diag = np.diagonal(rows, axis1=1, axis2=2)
    positive_off = np.clip(rows, 0.0, None).sum(axis=2) - np.clip(diag, 0.0, None)
    bound = diag + positive_off
    return float(np.max(np.min(bound, axis=0)))


def _check_delta(hypothesis: str, samples: MatrixSamples) -> CheckResult:
    cfg = settings.grid
    n = samples.n
    base = FORMS[hypothesis].num(samples)
    eye = np.eye(n)
    try:
        best = _feasible(base, n)
        if best is None:
            return CheckResult(
                hypothesis, Status.REFUTED, reason="no positive v satisfies the inequality on the grid", grid=samples.grid
            )
        ceiling = _delta_ceiling(base)
        if ceiling <= 0:
            return CheckResult(hypothesis, Status.REFUTED, reason="feasible only at delta = 0", grid=samples.grid)
        top = _feasible(base - ceiling * eye, n)
        if top is not None:
            best = top
        else:
            lo, hi = 0.0, ceiling
            while hi - lo > cfg.bisection_rel_tol * ceiling:
                mid = 0.5 * (lo + hi)
                trial = _feasible(base - mid * eye, n)
                log.debug("delta bisection", extra={"hypothesis": hypothesis, "delta": mid, "feasible": bool(trial)})
                if trial is not None:
                    lo, best = mid, trial
                else:
                    hi = mid
    except SimplexCyclingError as exc:
        log.exception("Simplex guard exceeded")
        return CheckResult(hypothesis, Status.UNDECIDED, reason=str(exc), grid=samples.grid)
    return _finish(hypothesis, samples, best.v)


def _check_alpha(hypothesis: str, samples: MatrixSamples) -> CheckResult:
    cfg = settings.grid
    n = samples.n
    form = FORMS[hypothesis]
    num, den = form.num(samples), form.den(samples)
    cap = cfg.alpha_cap
    try:
        best = _feasible(num - cap * den, n)
        if best is None:
            lo = 1.0 + cfg.alpha_margin
            best = _feasible(num - lo * den, n)
            if best is None:
                return CheckResult(hypothesis, Status.REFUTED, reason="no alpha > 1 on the grid", grid=samples.grid)
            hi = cap
            while math.log(hi / lo) > cfg.bisection_rel_tol:
                mid = math.sqrt(lo * hi)
                trial = _feasible(num - mid * den, n)
                log.debug("alpha bisection", extra={"hypothesis": hypothesis, "alpha": mid, "feasible": bool(trial)})
                if trial is not None:
                    lo, best = mid, trial
                else:
                    hi = mid
    except SimplexCyclingError as exc:
        log.exception("Simplex guard exceeded")
        return CheckResult(hypothesis, Status.UNDECIDED, reason=str(exc), grid=samples.grid)
    return _finish(hypothesis, samples, best.v)


def check_H2(samples: MatrixSamples) -> CheckResult:
    """[D - A - delta I] v >= 0 on the grid, largest delta."""
    return _check_delta("H2", samples)


def check_H5(samples: MatrixSamples) -> CheckResult:
    """[B + A - D - delta I] v >= 0 on the grid, largest delta."""
    return _check_delta("H5", samples)


def check_H2star(samples: MatrixSamples) -> CheckResult:
    """D v >= alpha A v on the grid with alpha > 1."""
    return _check_alpha("H2*", samples)


def check_H5star(samples: MatrixSamples) -> CheckResult:
    """B v >= alpha [D - A] v on the grid with alpha > 1."""
    return _check_alpha("H5*", samples)


def mmatrix_witness(N: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Positive v with u = N v > 0 for a Z-matrix N, or None if N is not a non-singular M-matrix."""
    N = np.asarray(N, dtype=float)
    off = N - np.diag(np.diag(N))
    if np.any(off > 0):
        raise ModelConstraintError("M-matrix test needs nonpositive off-diagonal entries")
    result = lp_feasible_v(N[None], N.shape[0])
    if result is None or result.s <= settings.grid.feasibility_tol:
        return None
    return result.v, N @ result.v


def check_sublinear_dissipative(
    sys: SystemSpec,
    beta_plus: Sequence[CoefficientFn] | None = None,
    gains: Sequence[float] | None = None,
    samples: MatrixSamples | None = None,
) -> CheckResult:
    """
    [D - diag(beta+) - A] u >= 0 on the grid, with limsup h+(x)/x < 1.

    The upper envelope of the system is used when beta_plus/gains are not given.
    """
    samples = samples or sample_matrices(sys)
    if beta_plus is None or gains is None:
        beta_plus, gains = upper_envelope(sys)
    if any(g >= 1.0 for g in gains):
        culprits = [i + 1 for i, g in enumerate(gains) if g >= 1.0]
        return CheckResult(
            "dissipative",
            Status.UNDECIDED,
            reason=f"not applicable: h+ is not sublinear for components {culprits}",
            grid=samples.grid,
        )
    bp = np.column_stack([np.asarray(evaluate(b, samples.times)) for b in beta_plus])
    rows = samples.D - samples.A
    idx = np.arange(samples.n)
    rows[:, idx, idx] -= bp
    try:
        result = lp_feasible_v(rows, samples.n, normalize=True)
    except SimplexCyclingError as exc:
        log.exception("Simplex guard exceeded")
        return CheckResult("dissipative", Status.UNDECIDED, reason=str(exc), grid=samples.grid)
    if result is None:
        return CheckResult(
            "dissipative", Status.REFUTED, reason="no positive u with [D+ - A] u >= 0 on the grid", grid=samples.grid
        )
    u = result.v
    if np.min(rows @ np.ones(samples.n)) >= np.min(rows @ u):
        u = np.ones(samples.n)
    slack = float(np.min(rows @ u))
    u_tuple = tuple(float(x) for x in u)
    witness = Witness("dissipative", u_tuple, slack, "slack", dict(samples.grid), u=u_tuple)
    return CheckResult("dissipative", Status.CERTIFIED, witness, grid=samples.grid)


def reverify_witness(sys: SystemSpec, result: CheckResult, factor: int = 10) -> tuple[bool, float]:
    """
    Re-evaluate a certified witness on a grid factor times finer.

    Returns (ok, finest margin); ok means the margin kept at least half of
    the stored one (alpha - 1 for the ratio forms).
    """
    if not result.certified:
        raise ValueError(f"{result.hypothesis} is not certified")
    if result.hypothesis not in FORMS:
        raise ValueError(f"no margin profile for {result.hypothesis}")
    witness = result.witness
    fine = refine(sys, witness.grid, factor)
    profile = margin_profile(result.hypothesis, fine, witness.v)
    finest = float(np.min(profile))
    if witness.margin_kind == "alpha":
        ok = finest - 1.0 >= 0.5 * (witness.margin - 1.0)
    else:
        ok = finest >= 0.5 * witness.margin
    if not ok:
        log.warning(
            "Witness loses its margin on a finer grid",
            extra={"hypothesis": result.hypothesis, "stored": witness.margin, "finest": finest},
        )
    return ok, finest


def ratio_diagnostics(samples: MatrixSamples) -> dict:
    """
    Tail-of-grid stand-ins for liminf d_i / sum_j a_ij and
    liminf beta_i / (d_i - sum_j a_ij).
    """
    half = len(samples.times) // 2
    d = np.diagonal(samples.D, axis1=1, axis2=2)[half:]
    a = samples.A.sum(axis=2)[half:]
    b = np.diagonal(samples.B, axis1=1, axis2=2)[half:]
    net = d - a
    with np.errstate(divide="ignore", invalid="ignore"):
        decay_ratio = np.where(a > 0, d / a, np.inf)
        birth_ratio = np.where(net > 0, b / net, np.inf)

    def _liminf(values: np.ndarray) -> list:
        out = []
        for x in np.min(values, axis=0):
            out.append(float(x) if math.isfinite(x) else "inf")
        return out

    return {"d_over_a": _liminf(decay_ratio), "beta_over_net_decay": _liminf(birth_ratio)}


def run_checks(samples: MatrixSamples) -> dict[str, CheckResult]:
    return {
        "H2": check_H2(samples),
        "H2*": check_H2star(samples),
        "H5": check_H5(samples),
        "H5*": check_H5star(samples),
    }

"""
Permanence / uniform persistence verdict from grid certificates and boundedness flags.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from src.errors import EnvelopeError
from src.hypotheses.checks import CheckResult
from src.hypotheses.samples import MatrixSamples
from src.logger import logger as log
from src.system.nonlinearity import CustomEnvelope, DistributedBirth, KernelBirth
from src.system.shapes import MackeyGlass, Nicholson
from src.system.spec import SystemSpec, has_linear_delays
from src.timefn import CoefficientFn, boundedness


class Outcome(str, Enum):
    PERMANENT = "PERMANENT"
    UNIFORMLY_PERSISTENT = "UNIFORMLY PERSISTENT"
    NO_VERDICT = "NO VERDICT"


COROLLARY = "corollary, no delays in the linear part"
PERMANENCE_THEOREM = "permanence theorem"
BIRTH_FAMILY_THEOREM = "permanence theorem for Nicholson / Mackey-Glass births"
PERSISTENCE_THEOREM = "uniform persistence theorem"


@dataclass(frozen=True)
class VerdictInputs:
    h2: CheckResult
    h2star: CheckResult
    h5: CheckResult
    h5star: CheckResult
    h4_ok: bool
    h4_reason: str
    linear_delays: bool
    a_bounded: bool
    beta_bounded_above: bool
    beta_liminf_positive: bool
    d_liminf_positive: bool
    f_bounded: bool
    h_minus_liminf_positive: bool
    has_harvest: bool = False
    harvest_ok: bool = True
    birth_family: bool = False
    c_bounded: bool = False

    def flags(self) -> dict:
        out = asdict(self)
        for key in ("h2", "h2star", "h5", "h5star"):
            out.pop(key)
        return out


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    theorem: str = ""
    branch: str = ""
    blocking: tuple[str, ...] = ()
    # min_{t >= T} x_j(t) >= m v_j for some m > 0
    floor_v: tuple[float, ...] | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def fired(self) -> bool:
        return self.outcome is not Outcome.NO_VERDICT

    def floor_form(self) -> str:
        if self.floor_v is None:
            return ""
        parts = ", ".join(f"x{j + 1} >= m*{v:.6g}" for j, v in enumerate(self.floor_v))
        return f"eventually {parts} for some m > 0"

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "theorem": self.theorem,
            "branch": self.branch,
            "blocking": list(self.blocking),
            "floor_v": list(self.floor_v) if self.floor_v is not None else None,
            "floor_form": self.floor_form(),
            "notes": list(self.notes),
        }


def _floor(inp: VerdictInputs) -> tuple[float, ...] | None:
    for result in (inp.h5, inp.h5star):
        if result.certified:
            return result.witness.v
    return None


def _permanence_blockers(inp: VerdictInputs) -> list[str]:
    blocking: list[str] = []
    if inp.linear_delays and not inp.a_bounded:
        blocking.append("a_ij unbounded with delays in the linear part")
    if not (inp.h2.certified or (inp.h2star.certified and inp.d_liminf_positive)):
        blocking.append("H2 not certified")
    h5_branch = inp.h5.certified and inp.beta_bounded_above
    h5star_branch = inp.h5star.certified and inp.beta_liminf_positive
    if not (h5_branch or h5star_branch):
        if inp.h5.certified and not inp.beta_bounded_above:
            blocking.append("β unbounded")
        elif inp.h5star.certified:
            blocking.append("β not bounded away from 0")
        else:
            blocking.append("H5/H5* not certified")
    if not inp.f_bounded:
        blocking.append("f unbounded")
    return blocking


def permanence_verdict(inp: VerdictInputs) -> Verdict:
    """
    Apply the theorem hypotheses literally; the first branch that fires wins.

    Permanence branches are tried before the persistence ones. When nothing
    fires, blocking names every unmet condition of the permanence theorem.

    :raises ValueError: the checks were not run on the same grid
    """
    grids = [r.grid for r in (inp.h2, inp.h2star, inp.h5, inp.h5star)]
    if any(g != grids[0] for g in grids[1:]):
        raise ValueError("hypothesis checks were run on different grids")

    if not inp.h4_ok:
        log.info("No verdict, envelope condition fails", extra={"reason": inp.h4_reason})
        return Verdict(Outcome.NO_VERDICT, blocking=(inp.h4_reason,))
    if inp.has_harvest and not inp.harvest_ok:
        return Verdict(Outcome.NO_VERDICT, blocking=("harvest term not admissible",))

    floor_v = _floor(inp)
    notes = ("harvest terms admitted: bounded kappa, g'(0+) = 0",) if inp.has_harvest else ()
    blocking = tuple(_permanence_blockers(inp))

    if not inp.linear_delays and inp.h5star.certified and inp.h2.certified and inp.f_bounded:
        return Verdict(Outcome.PERMANENT, COROLLARY, "H2 + H5* + f bounded", (), floor_v, notes)
    if not blocking:
        branch = "H2" if inp.h2.certified else "H2* + liminf d > 0"
        branch += " + H5, beta bounded" if inp.h5.certified and inp.beta_bounded_above else " + H5*, liminf beta > 0"
        return Verdict(Outcome.PERMANENT, PERMANENCE_THEOREM, branch, (), floor_v, notes)
    if (
        inp.birth_family
        and inp.a_bounded
        and inp.c_bounded
        and inp.beta_bounded_above
        and inp.h2.certified
        and inp.h5.certified
    ):
        return Verdict(Outcome.PERMANENT, BIRTH_FAMILY_THEOREM, "bounded a, c, beta + H2 + H5", (), floor_v, notes)

    if not inp.linear_delays and inp.h5star.certified and inp.h_minus_liminf_positive:
        return Verdict(
            Outcome.UNIFORMLY_PERSISTENT, COROLLARY, "H5* + liminf h- at infinity > 0", blocking, floor_v, notes
        )
    linear_ok = not inp.linear_delays or inp.a_bounded
    if linear_ok and inp.h5star.certified and inp.beta_liminf_positive and inp.h_minus_liminf_positive:
        return Verdict(
            Outcome.UNIFORMLY_PERSISTENT,
            PERSISTENCE_THEOREM,
            "H5* + liminf beta > 0 + liminf h- at infinity > 0",
            blocking,
            floor_v,
            notes,
        )
    return Verdict(Outcome.NO_VERDICT, blocking=blocking, notes=notes)


def _all_flags(fns: list[CoefficientFn], window: tuple[float, float], points: int, name: str):
    flags = [boundedness(f, window, points, name) for f in fns]
    above = all(b.bounded_above for b in flags)
    below = all(b.bounded_below_positive for b in flags)
    return above, below, flags


def envelope_condition(sys: SystemSpec, samples: MatrixSamples) -> tuple[bool, str]:
    """beta_i > 0 on the grid and a lower shape with h-(0) = 0, h-'(0+) > 0 for every component."""
    for i, f in enumerate(sys.birth):
        if f is None:
            return False, f"H4 fails: x{i + 1} has no birth term"
        try:
            shape = f.lower_shape()
        except EnvelopeError as exc:
            return False, f"H4 fails: {exc}"
        if float(shape(0.0)) != 0.0:
            return False, f"H4 fails: h-(0) != 0 for x{i + 1}"
        if not shape.gain() > 0:
            return False, f"H4 fails: h-'(0+) = 0 for x{i + 1}"
        if np.any(samples.beta[:, i] <= 0):
            return False, f"H4 fails: beta{i + 1} is not positive on the grid"
    return True, ""


def _shape_coefficients(sys: SystemSpec) -> list[CoefficientFn]:
    out = []
    for f in sys.birth:
        if f is None:
            continue
        for shape in f.shapes():
            c = getattr(shape, "c", None)
            if c is not None:
                out.append(c)
    return out


def _is_birth_family(sys: SystemSpec) -> bool:
    for f in sys.birth:
        if not isinstance(f, (KernelBirth, DistributedBirth)):
            return False
        if not all(isinstance(shape, (Nicholson, MackeyGlass)) for shape in f.shapes()):
            return False
    return True


def _f_bounded(sys: SystemSpec, beta_bounded: bool) -> bool:
    for f in sys.birth:
        if f is None:
            continue
        if isinstance(f, CustomEnvelope):
            if not f.bounded:
                return False
            continue
        shapes = f.shapes()
        if not shapes or not all(math.isfinite(shape.sup_bound()) for shape in shapes):
            return False
    return beta_bounded


def _h_minus_at_infinity(sys: SystemSpec) -> bool:
    for f in sys.birth:
        if f is None:
            return False
        try:
            if not f.lower_shape().limit_at_infinity() > 0:
                return False
        except EnvelopeError:
            return False
    return True


def gather_inputs(
    sys: SystemSpec,
    samples: MatrixSamples,
    checks: dict[str, CheckResult],
) -> tuple[VerdictInputs, dict]:
    """Boundedness flags over [t_check, t_max] plus the check results; also returns per-function detail."""
    window = (samples.grid["t_check"], samples.grid["t_max"])
    points = samples.grid["points"]

    couplings = [sys.coupling(i, j) for i in range(sys.n) for j in range(sys.n)]
    couplings = [a for a in couplings if a is not None]
    betas = [f.beta() for f in sys.birth if f is not None and not _missing_beta(f)]
    a_above, _, a_flags = _all_flags(couplings, window, points, "a_ij")
    b_above, b_below, b_flags = _all_flags(betas, window, points, "beta_i")
    _, d_below, d_flags = _all_flags(list(sys.decay), window, points, "d_i")
    c_above, _, c_flags = _all_flags(_shape_coefficients(sys), window, points, "c_ik")

    harvests = [k for k in sys.harvest if k is not None]
    k_above, _, k_flags = _all_flags([k.kappa for k in harvests], window, points, "kappa_i")

    h4_ok, h4_reason = envelope_condition(sys, samples)
    f_bounded = _f_bounded(sys, b_above)
    inputs = VerdictInputs(
        h2=checks["H2"],
        h2star=checks["H2*"],
        h5=checks["H5"],
        h5star=checks["H5*"],
        h4_ok=h4_ok,
        h4_reason=h4_reason,
        linear_delays=has_linear_delays(sys),
        a_bounded=a_above,
        beta_bounded_above=b_above and bool(betas),
        beta_liminf_positive=b_below and bool(betas),
        d_liminf_positive=d_below,
        f_bounded=f_bounded,
        h_minus_liminf_positive=_h_minus_at_infinity(sys),
        has_harvest=bool(harvests),
        harvest_ok=k_above and f_bounded,
        birth_family=_is_birth_family(sys),
        c_bounded=c_above,
    )
    detail = {
        "a_ij": [b.to_dict() for b in a_flags],
        "beta_i": [b.to_dict() for b in b_flags],
        "d_i": [b.to_dict() for b in d_flags],
        "c_ik": [b.to_dict() for b in c_flags],
        "kappa_i": [b.to_dict() for b in k_flags],
    }
    return inputs, detail


def _missing_beta(f) -> bool:
    try:
        f.beta()
    except EnvelopeError:
        return True
    return False

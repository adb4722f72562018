__all__ = [
    "MatrixSamples",
    "sample_matrices",
    "grid_times",
    "refine",
    "LPResult",
    "lp_feasible_v",
    "simplex_max",
    "Status",
    "Witness",
    "CheckResult",
    "margin_profile",
    "check_H2",
    "check_H2star",
    "check_H5",
    "check_H5star",
    "mmatrix_witness",
    "check_sublinear_dissipative",
    "reverify_witness",
    "ratio_diagnostics",
    "run_checks",
    "Outcome",
    "Verdict",
    "VerdictInputs",
    "permanence_verdict",
    "envelope_condition",
    "gather_inputs",
    "HypothesisReport",
    "build_report",
    "render_text",
]

from src.hypotheses.checks import (
    CheckResult,
    Status,
    Witness,
    check_H2,
    check_H2star,
    check_H5,
    check_H5star,
    check_sublinear_dissipative,
    margin_profile,
    mmatrix_witness,
    ratio_diagnostics,
    reverify_witness,
    run_checks,
)
from src.hypotheses.report import HypothesisReport, build_report, render_text
from src.hypotheses.samples import MatrixSamples, grid_times, refine, sample_matrices
from src.hypotheses.simplex import LPResult, lp_feasible_v, simplex_max
from src.hypotheses.verdict import (
    Outcome,
    Verdict,
    VerdictInputs,
    envelope_condition,
    gather_inputs,
    permanence_verdict,
)

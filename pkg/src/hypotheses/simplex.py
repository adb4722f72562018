"""
Dense tableau simplex for the witness problem

    maximize s  subject to  P v >= s 1,  eps <= v_i <= 1.

Substituting v = eps + w and s = sigma - shift puts it in the form
max c x, A x <= b, x >= 0 with b >= 0, so the slack basis is feasible
from the start and no phase one is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.config import settings
from src.errors import SimplexCyclingError
from src.logger import logger as log


@dataclass(frozen=True)
class LPResult:
    v: np.ndarray
    # worst slack min(P v) for the returned v
    s: float


def simplex_max(c: np.ndarray, A: np.ndarray, b: np.ndarray, max_iterations: int, tol: float = 1e-12) -> np.ndarray:
    """
    Maximize c x subject to A x <= b, x >= 0, for b >= 0.

    Bland's rule on both the entering and the leaving variable.

    :raises SimplexCyclingError: more than max_iterations pivots
    :raises ValueError: the problem is unbounded
    """
    m, n = A.shape
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = A
    tableau[:m, n : n + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[m, :n] = -c
    basis = list(range(n, n + m))

    for _ in range(max_iterations):
        reduced = tableau[m, :-1]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            break
        col = int(entering[0])
        column = tableau[:m, col]
        positive = column > tol
        if not np.any(positive):
            raise ValueError("linear program is unbounded")
        ratios = np.full(m, np.inf)
        ratios[positive] = tableau[:m, -1][positive] / column[positive]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
        row = int(min(ties, key=lambda r: basis[r]))

        tableau[row] /= tableau[row, col]
        others = np.arange(m + 1) != row
        tableau[others] -= np.outer(tableau[others, col], tableau[row])
        basis[row] = col
    else:
        raise SimplexCyclingError(f"simplex did not terminate within {max_iterations} pivots")

    x = np.zeros(n + m)
    for r, var in enumerate(basis):
        x[var] = tableau[r, -1]
    return x[:n]


def unique_rows(rows: np.ndarray) -> np.ndarray:
    return np.unique(np.asarray(rows, dtype=float), axis=0)


def normalize_rows(rows: np.ndarray) -> np.ndarray:
    """Scale each row to max-abs 1; feasibility of P v >= 0 is unchanged."""
    scale = np.max(np.abs(rows), axis=1)
    scale[scale == 0] = 1.0
    return rows / scale[:, None]


def lp_feasible_v(
    rows: np.ndarray,
    n: int,
    eps: float | None = None,
    normalize: bool = False,
) -> LPResult | None:
    """
    Positive v (max component 1) maximizing the worst slack of rows v, or
    None when the optimum is negative.

    rows is either a stack of n x n matrices (K, n, n) or the flattened (K n, n) rows.

    :raises SimplexCyclingError: the pivot guard was exceeded
    """
    cfg = settings.grid
    eps = cfg.lp_epsilon if eps is None else eps
    P = np.asarray(rows, dtype=float).reshape(-1, n)
    P = unique_rows(P)
    if normalize:
        P = unique_rows(normalize_rows(P))

    shift = float(np.max(np.sum(np.abs(P), axis=1))) + 1.0
    # -P w + sigma <= eps * rowsum(P) + shift, w_i <= 1 - eps
    A_ub = np.vstack([
        np.hstack([-P, np.ones((P.shape[0], 1))]),
        np.hstack([np.eye(n), np.zeros((n, 1))]),
    ])
    b_ub = np.concatenate([eps * P.sum(axis=1) + shift, np.full(n, 1.0 - eps)])
    c = np.zeros(n + 1)
    c[-1] = 1.0

    x = simplex_max(c, A_ub, b_ub, cfg.simplex_max_iterations)
    v = eps + x[:n]
    v = v / np.max(v)
    s = float(np.min(P @ v))
    log.debug("LP solved", extra={"rows": P.shape[0], "n": n, "slack": s})
    if s < -cfg.feasibility_tol:
        return None
    return LPResult(v, s)

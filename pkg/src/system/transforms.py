from __future__ import annotations

from typing import Sequence

import numpy as np

from src.errors import EnvelopeError, ModelConstraintError
from src.logger import logger as log
from src.system.envelope import lower_envelope
from src.system.nonlinearity import WindowMinBirth
from src.system.shapes import WindowClamp
from src.system.spec import LinearTerm, SystemSpec
from src.timefn import scaled


def scale_system(sys: SystemSpec, v: Sequence[float]) -> SystemSpec:
    """
    The system satisfied by x_hat_i = x_i / v_i.

    a_hat_ij = a_ij v_j / v_i and f_hat_i(t, phi) = f_i(t, v_i phi) / v_i.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (sys.n,) or np.any(v <= 0):
        raise ModelConstraintError(f"scaling vector must be positive with {sys.n} entries")

    linear = tuple(
        tuple(
            tuple(LinearTerm(scaled(term.a, v[j] / v[i]), term.kernel) for term in sys.linear[i][j])
            for j in range(sys.n)
        )
        for i in range(sys.n)
    )
    birth = tuple(None if f is None else f.rescaled(float(v[i])) for i, f in enumerate(sys.birth))
    harvest = tuple(None if k is None else k.rescaled(float(v[i])) for i, k in enumerate(sys.harvest))
    return SystemSpec(sys.n, sys.tau, sys.decay, linear, birth, harvest, sys.domain_start, sys.name)


def build_cooperative_lower(sys: SystemSpec, m: float, M: float) -> SystemSpec:
    """
    Auxiliary cooperative system with births beta_i(t) H_i(min of x_i over [t - tau, t]).

    H_i clamps the worst-case envelope at m and satisfies H_i(x) <= x.

    :raises EnvelopeError: m exceeds the monotone cap of some envelope
    """
    if not 0 < m <= M:
        raise ModelConstraintError(f"need 0 < m <= M, got m={m}, M={M}")
    window = sys.tau
    births = []
    for i, env in enumerate(lower_envelope(sys)):
        if env is None:
            births.append(None)
            continue
        if m > env.monotone_cap * (1 + 1e-12):
            raise EnvelopeError(
                f"m={m:.6g} is above the monotone cap {env.monotone_cap:.6g} of h{i + 1}-"
            )
        clamp = WindowClamp(env.h_minus, m)
        span = np.linspace(m, M, 257)
        at_m = float(env.h_minus.value(0.0, np.asarray(m)))
        floor = float(np.min(env.h_minus.value(0.0, span)))
        if at_m > floor * (1 + 1e-12):
            log.warning(
                "Clamped envelope does not lower-bound h over [m, M]",
                extra={"component": i + 1, "m": m, "M": M, "h_at_m": at_m, "min_on_range": floor},
            )
        births.append(WindowMinBirth(env.beta, clamp, window))
    return SystemSpec(
        sys.n, sys.tau, sys.decay, sys.linear, tuple(births), sys.harvest, sys.domain_start,
        f"{sys.name}-lower" if sys.name else "lower",
    )

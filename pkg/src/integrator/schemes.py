"""One fixed step of the explicit schemes; the history is hidden behind stage_rhs."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

StageRhs = Callable[[float, np.ndarray], np.ndarray]

_TAYLOR_TERMS = 20


def rk4_step(t: float, y: np.ndarray, h: float, f_n: np.ndarray, stage_rhs: StageRhs) -> np.ndarray:
    """Classical RK4; f_n is the right-hand side at (t, y), reused as k1."""
    k1 = f_n
    k2 = stage_rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = stage_rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = stage_rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def phi_functions(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """phi_1, phi_2, phi_3 of exponential integrators, Taylor series near 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1.0
    zs = np.where(small, z, 0.0)
    series = []
    for k in (1, 2, 3):
        total = np.zeros_like(zs)
        power = np.ones_like(zs)
        for m in range(_TAYLOR_TERMS):
            total = total + power / math.factorial(m + k)
            power = power * zs
        series.append(total)

    zb = np.where(small, 1.0, z)
    ez = np.exp(zb)
    p1 = (ez - 1.0) / zb
    p2 = (ez - 1.0 - zb) / zb**2
    p3 = (ez - 1.0 - zb - 0.5 * zb**2) / zb**3
    return (
        np.where(small, series[0], p1),
        np.where(small, series[1], p2),
        np.where(small, series[2], p3),
    )


def etd4_step(
    t: float,
    y: np.ndarray,
    h: float,
    f_n: np.ndarray,
    stage_rhs: StageRhs,
    decay_mid: np.ndarray,
) -> np.ndarray:
    """
    Fourth-order exponential time differencing (Cox-Matthews).

    The diagonal part -decay_mid * x is integrated exactly; everything else
    in the right-hand side is the explicit remainder N(t, x) = rhs + decay_mid * x.
    """
    d = np.asarray(decay_mid, dtype=float)
    z = -d * h
    e_half = np.exp(0.5 * z)
    e_full = np.exp(z)
    half_phi1, _, _ = phi_functions(0.5 * z)
    phi1, phi2, phi3 = phi_functions(z)

    def remainder(s: float, x: np.ndarray) -> np.ndarray:
        return stage_rhs(s, x) + d * x

    n_u = f_n + d * y
    a = e_half * y + 0.5 * h * half_phi1 * n_u
    n_a = remainder(t + 0.5 * h, a)
    b = e_half * y + 0.5 * h * half_phi1 * n_a
    n_b = remainder(t + 0.5 * h, b)
    c = e_half * a + 0.5 * h * half_phi1 * (2.0 * n_b - n_u)
    n_c = remainder(t + h, c)

    f1 = phi1 - 3.0 * phi2 + 4.0 * phi3
    f2 = phi2 - 2.0 * phi3
    f3 = -phi2 + 4.0 * phi3
    return e_full * y + h * (f1 * n_u + 2.0 * f2 * (n_a + n_b) + f3 * n_c)

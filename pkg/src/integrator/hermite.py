"""Cubic Hermite segments: values, extrema and Gauss panels."""

from functools import lru_cache

import numpy as np


def cubic_hermite(theta, h, y0, y1, m0, m1):
    """Value at local coordinate theta in [0, 1] of the cubic with end values y and slopes m."""
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + theta
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    return h00 * y0 + h01 * y1 + h10 * h * m0 + h11 * h * m1


def cubic_hermite_slope(theta, h, y0, y1, m0, m1):
    """d/dt of cubic_hermite (per unit time, not per theta)."""
    t2 = theta * theta
    d00 = 6 * t2 - 6 * theta
    d10 = 3 * t2 - 4 * theta + 1
    d01 = -6 * t2 + 6 * theta
    d11 = 3 * t2 - 2 * theta
    return (d00 * y0 + d01 * y1) / h + d10 * m0 + d11 * m1


def critical_points(h, y0, y1, m0, m1):
    """
    Roots in theta of the cubic's derivative, as two arrays (nan where absent).

    Inputs broadcast; the quadratic is a theta^2 + b theta + c.
    """
    a = 6 * y0 + 3 * h * m0 - 6 * y1 + 3 * h * m1
    b = -6 * y0 - 4 * h * m0 + 6 * y1 - 2 * h * m1
    c = h * m0 * np.ones_like(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = b * b - 4 * a * c
        sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
        quad_1 = (-b + sq) / (2 * a)
        quad_2 = (-b - sq) / (2 * a)
        linear = -c / b
    small = np.abs(a) <= 1e-14 * (np.abs(b) + np.abs(c) + 1e-300)
    r1 = np.where(small, linear, quad_1)
    r2 = np.where(small, np.nan, quad_2)
    return r1, r2


def segment_extrema(h, y0, y1, m0, m1, lo=0.0, hi=1.0):
    """(min, max) of each cubic over theta in [lo, hi], from endpoints and interior critical points."""
    lo = np.asarray(lo, dtype=float) * np.ones_like(y0)
    hi = np.asarray(hi, dtype=float) * np.ones_like(y0)
    candidates = [cubic_hermite(lo, h, y0, y1, m0, m1), cubic_hermite(hi, h, y0, y1, m0, m1)]
    for root in critical_points(h, y0, y1, m0, m1):
        inside = np.isfinite(root) & (root > lo) & (root < hi)
        theta = np.where(inside, root, lo)
        candidates.append(cubic_hermite(theta, h, y0, y1, m0, m1))
    stack = np.stack(candidates)
    return stack.min(axis=0), stack.max(axis=0)


@lru_cache(maxsize=8)
def gauss_rule(points: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(points)
    return 0.5 * (nodes + 1.0), 0.5 * weights

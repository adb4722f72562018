from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from src.config import settings
from src.system.shapes import Shape
from src.system.spec import SystemSpec
from src.timefn import CoefficientFn, const, scaled


@dataclass(frozen=True)
class Envelope:
    """Lower envelope data: f_i(t, phi) >= beta(t) h_minus(min phi)."""

    beta: CoefficientFn
    h_minus: Shape
    monotone_cap: float
    gain: float

    @property
    def normalizable(self) -> bool:
        """h_minus'(0+) is positive and finite, so it can be rescaled to 1."""
        return 0.0 < self.gain < math.inf

    def normalized_beta(self) -> CoefficientFn:
        return scaled(self.beta, self.gain) if self.normalizable else self.beta

    def h_normalized(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.minimum(x, self.monotone_cap)
        values = self.h_minus.value(0.0, y)
        return values / self.gain if self.normalizable else values


def beta_of(sys: SystemSpec) -> tuple[CoefficientFn, ...]:
    """Envelope coefficients beta_i(t); components without births get beta = 0."""
    return tuple(const(0.0) if f is None else f.beta() for f in sys.birth)


def lower_envelope(sys: SystemSpec) -> tuple[Envelope | None, ...]:
    """
    (H4) data per component, built from worst-case constants.

    h_minus keeps the untruncated worst-case shape; monotone_cap is the largest m
    with h_minus increasing on [0, m].

    :raises EnvelopeError: a shape coefficient lacks a declared upper bound
    """
    out: list[Envelope | None] = []
    limit = settings.envelope.monotone_cap_limit
    for f in sys.birth:
        if f is None:
            out.append(None)
            continue
        shape = f.lower_shape()
        cap = min(shape.monotone_cap(), limit)
        out.append(Envelope(f.beta(), shape, cap, shape.gain()))
    return tuple(out)


def upper_envelope(sys: SystemSpec) -> tuple[tuple[CoefficientFn, ...], tuple[float, ...]]:
    """
    beta_plus and the asymptotic gain limsup h_plus(x)/x per component.

    Bounded shapes have gain 0; otherwise h_plus(x) = x is assumed (gain 1).
    """
    betas: list[CoefficientFn] = []
    gains: list[float] = []
    for f in sys.birth:
        if f is None:
            betas.append(const(0.0))
            gains.append(0.0)
            continue
        betas.append(f.beta())
        if getattr(f, "bounded", False):
            gains.append(0.0)
            continue
        shapes = f.shapes()
        bounded = bool(shapes) and all(math.isfinite(shape.sup_bound()) for shape in shapes)
        gains.append(0.0 if bounded else 1.0)
    return tuple(betas), tuple(gains)

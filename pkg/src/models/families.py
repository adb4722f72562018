"""
Nicholson and Mackey-Glass systems

    x_i' = -d_i x_i + sum_j L_ij x_j,t + sum_k b_ik * (births of x_i lagged by tau_ik)

with point lags (discrete form) or lambda-weighted windows (distributed form).
"""

from __future__ import annotations

from typing import Callable, Sequence

from src.errors import ModelConstraintError
from src.system.kernels import DelayKernel, Density, InstantPoint, LagPoint, UniformDensity, lag_point
from src.system.nonlinearity import BirthTerm, DistributedBirth, DistributedTerm, KernelBirth
from src.system.shapes import MackeyGlass, Nicholson, Shape
from src.system.spec import LinearTerm, SystemSpec, make_system
from src.timefn import CoefficientFn, as_fn

Coef = CoefficientFn | float
KERNEL_TYPES = (InstantPoint, LagPoint, Density, UniformDensity)


def _linear(
    n: int,
    a: Sequence[Sequence[Coef | None]] | None,
    kernels: Sequence[Sequence[DelayKernel | Coef | None]] | None,
) -> list[list[LinearTerm | None]]:
    rows: list[list[LinearTerm | None]] = []
    for i in range(n):
        row: list[LinearTerm | None] = []
        for j in range(n):
            coef = a[i][j] if a is not None else None
            if coef is None:
                row.append(None)
                continue
            kernel = kernels[i][j] if kernels is not None else None
            if kernel is None:
                kernel = InstantPoint()
            elif not isinstance(kernel, KERNEL_TYPES):
                kernel = lag_point(kernel)
            row.append(LinearTerm(as_fn(coef), kernel))
        rows.append(row)
    return rows


def _check_lengths(n: int, **per_component) -> None:
    for name, value in per_component.items():
        if value is not None and len(value) != n:
            raise ModelConstraintError(f"{name} needs one entry per component ({n}), got {len(value)}")


def _family(
    shape_of: Callable[[int, Coef], Shape],
    d: Sequence[Coef],
    b: Sequence[Sequence[Coef]],
    c: Sequence[Sequence[Coef]],
    lags: Sequence[Sequence[Coef]],
    a: Sequence[Sequence[Coef | None]] | None,
    linear_kernels: Sequence[Sequence[DelayKernel | Coef | None]] | None,
    lam: Sequence[Sequence[Coef]] | None,
    evaluation_time: str,
    tau: float | None,
    domain_start: float,
    name: str,
) -> SystemSpec:
    n = len(d)
    _check_lengths(n, b=b, c=c, lags=lags, a=a, linear_kernels=linear_kernels, lam=lam)
    births = []
    for i in range(n):
        if not (len(b[i]) == len(c[i]) == len(lags[i])):
            raise ModelConstraintError(f"b, c and lags of x{i + 1} need the same number of terms")
        if lam is not None and len(lam[i]) != len(b[i]):
            raise ModelConstraintError(f"lam of x{i + 1} needs one density per birth term")
        if not b[i]:
            births.append(None)
            continue
        if lam is None:
            births.append(
                KernelBirth(
                    tuple(
                        BirthTerm(as_fn(b_ik), shape_of(i, c_ik), lag_point(lag))
                        for b_ik, c_ik, lag in zip(b[i], c[i], lags[i])
                    )
                )
            )
        else:
            births.append(
                DistributedBirth(
                    tuple(
                        DistributedTerm(as_fn(b_ik), as_fn(lam_ik), as_fn(lag), shape_of(i, c_ik))
                        for b_ik, c_ik, lag, lam_ik in zip(b[i], c[i], lags[i], lam[i])
                    ),
                    evaluation_time,
                )
            )
    return make_system(
        d,
        _linear(n, a, linear_kernels),
        births,
        tau=tau,
        domain_start=domain_start,
        name=name,
    )


def nicholson_system(
    d: Sequence[Coef],
    b: Sequence[Sequence[Coef]],
    c: Sequence[Sequence[Coef]],
    lags: Sequence[Sequence[Coef]],
    a: Sequence[Sequence[Coef | None]] | None = None,
    linear_kernels: Sequence[Sequence[DelayKernel | Coef | None]] | None = None,
    lam: Sequence[Sequence[Coef]] | None = None,
    evaluation_time: str = "s",
    tau: float | None = None,
    domain_start: float = 0.0,
    name: str = "nicholson",
) -> SystemSpec:
    """
    Births b_ik x(t - tau_ik) exp(-c_ik x(t - tau_ik)); with lam, b_ik times the
    lam-weighted integral of x exp(-c_ik x) over [t - tau_ik, t].

    linear_kernels entries are kernels or lags (numbers / functions); None means instantaneous.
    """
    return _family(
        lambda i, c_ik: Nicholson(as_fn(c_ik)),
        d, b, c, lags, a, linear_kernels, lam, evaluation_time, tau, domain_start, name,
    )


def mackey_glass_system(
    d: Sequence[Coef],
    b: Sequence[Sequence[Coef]],
    c: Sequence[Sequence[Coef]],
    lags: Sequence[Sequence[Coef]],
    alpha: Sequence[float] | float = 1.0,
    a: Sequence[Sequence[Coef | None]] | None = None,
    linear_kernels: Sequence[Sequence[DelayKernel | Coef | None]] | None = None,
    lam: Sequence[Sequence[Coef]] | None = None,
    evaluation_time: str = "s",
    tau: float | None = None,
    domain_start: float = 0.0,
    name: str = "mackey-glass",
) -> SystemSpec:
    """As nicholson_system with x / (1 + c_ik x^alpha_i), alpha_i >= 1."""
    n = len(d)
    alphas = [float(alpha)] * n if isinstance(alpha, (int, float)) else [float(x) for x in alpha]
    _check_lengths(n, alpha=alphas)
    return _family(
        lambda i, c_ik: MackeyGlass(as_fn(c_ik), alphas[i]),
        d, b, c, lags, a, linear_kernels, lam, evaluation_time, tau, domain_start, name,
    )

"""
Worked examples with their closed-form solutions and the hypothesis
outcomes they are known to produce on the default grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from src.config import Scheme
from src.errors import ModelConstraintError
from src.experiments.exact import ExactSolution
from src.hypotheses.checks import Status
from src.hypotheses.verdict import Outcome
from src.integrator.solver import constant_segment
from src.models.families import mackey_glass_system, nicholson_system
from src.system.kernels import InstantPoint, lag_point, uniform
from src.system.nonlinearity import BirthTerm, KernelBirth
from src.system.shapes import ClampedPower, MackeyGlass
from src.system.spec import LinearTerm, SystemSpec, make_system
from src.timefn import CoefficientFn, const, exp_fn, rational, t_pow

C_, R_, U_ = Status.CERTIFIED, Status.REFUTED, Status.UNDECIDED


@dataclass(frozen=True)
class ModelFixture:
    key: str
    spec: SystemSpec
    exact: ExactSolution | None = None
    # hypothesis -> expected status on the default grid
    expected: dict[str, Status] = field(default_factory=dict)
    expected_verdict: Outcome = Outcome.NO_VERDICT
    expected_blocking: str | None = None
    initial: tuple[CoefficientFn, ...] = ()
    scheme: Scheme = Scheme.RK4
    step: float = 1e-2
    params: dict = field(default_factory=dict)

    def initial_segment(self) -> list[CoefficientFn]:
        if self.initial:
            return list(self.initial)
        if self.exact is not None:
            return list(self.exact.components)
        return constant_segment([1.0] * self.spec.n)


def _inverse_shift(C: float) -> CoefficientFn:
    """1 / (t + C)"""
    return rational([1.0], [C, 1.0])


def nicholson_two_patch() -> ModelFixture:
    """d = 1, a_12 = a_21 = 0.25 instantaneous, beta = 2, c = 1, birth lag 1."""
    spec = nicholson_system(
        d=[1.0, 1.0],
        b=[[2.0], [2.0]],
        c=[[1.0], [1.0]],
        lags=[[1.0], [1.0]],
        a=[[None, 0.25], [0.25, None]],
        name="nicholson2patch",
    )
    return ModelFixture(
        "nicholson2patch",
        spec,
        expected={"H2": C_, "H2*": C_, "H5": C_, "H5*": C_},
        expected_verdict=Outcome.PERMANENT,
    )


def scalar_nicholson(beta: float = 2.0, lag: float = 1.0) -> ModelFixture:
    """x' = -x + beta x(t - lag) exp(-x(t - lag)), equilibrium ln(beta)."""
    spec = nicholson_system(d=[1.0], b=[[beta]], c=[[1.0]], lags=[[lag]], name="scalar-nicholson")
    return ModelFixture(
        "scalar-nicholson",
        spec,
        expected={"H2": C_, "H2*": C_, "H5": C_, "H5*": C_},
        expected_verdict=Outcome.PERMANENT,
        params={"beta": beta, "lag": lag},
    )


def extinction_demo() -> ModelFixture:
    """x' = -x + exp(-t) x(t - 1)"""
    spec = make_system(
        [1.0],
        [[LinearTerm(exp_fn(-1.0), lag_point(1.0))]],
        name="extinction-demo",
    )
    return ModelFixture("extinction-demo", spec, expected={"H2": C_, "H5": R_})


def example_3_1(C: float = 2.0, mu: float = 1.0, tau: float = 0.5) -> ModelFixture:
    """
    Planar linear system x1' = -d x1 + a x2(t - tau), x2' = -d x2 + a x1(t - tau)
    with a = mu (t - tau + C)(t + C + 1) / tau growing like t^2 and
    d - a = mu + 1 / ((t + C)(t + C + 1)); both components equal 1 + 1/(t + C).
    """
    if not C > tau > 0 or mu <= 0:
        raise ModelConstraintError("example 3.1 needs C > tau > 0 and mu > 0")
    k = mu / tau
    a = rational([k * (C - tau) * (C + 1.0), k * (2.0 * C + 1.0 - tau), k])
    d = rational([k * C * (C + 1.0 - tau), k * (2.0 * C + 1.0 - tau), k]) + rational(
        [1.0], [C * (C + 1.0), 2.0 * C + 1.0, 1.0]
    )
    spec = make_system(
        [d, d],
        [[None, LinearTerm(a, lag_point(tau))], [LinearTerm(a, lag_point(tau)), None]],
        name="example3.1",
    )
    phi = rational([C + 1.0, 1.0], [C, 1.0])
    return ModelFixture(
        "example3.1",
        spec,
        exact=ExactSolution((phi, phi), -tau),
        expected={"H2": C_, "H2*": R_, "H5": R_},
        expected_blocking="H4 fails: x1 has no birth term",
        scheme=Scheme.ETD4,
        params={"C": C, "mu": mu, "tau": tau},
    )


def example_3_1_stable(d: float = 2.0, mu: float = 1.0, tau: float = 0.5) -> ModelFixture:
    """The same planar structure with constant d and a = d - mu."""
    a = const(d - mu)
    spec = make_system(
        [d, d],
        [[None, LinearTerm(a, lag_point(tau))], [LinearTerm(a, lag_point(tau)), None]],
        name="example3.1-stable",
    )
    return ModelFixture(
        "example3.1-stable",
        spec,
        expected={"H2": C_, "H2*": C_, "H5": R_},
        params={"d": d, "mu": mu, "tau": tau},
    )


def example_3_2(
    n: int = 2,
    eta: float = 1.0,
    d_diag: float = 3.0,
    d_off: float = 0.5,
    b: float = 0.5,
    r: float = 1.0,
    beta_scale: float = 3.0,
    c: float = 1.0,
    nu: float = 1.0,
    sigma: float = 1.0,
) -> ModelFixture:
    """
    Mackey-Glass system with t^eta coefficients:

        x_i' = -d_ii t^eta x_i + sum_{j != i} d_ij t^eta x_j
               + sum_j b t^eta * integral over [-r, 0] of x_j(t + s) ds
               + beta_i(t) * uniform average over [-sigma, 0] of x_i / (1 + c x_i^nu)

    with beta_i(t) = beta_scale t^eta. The windowed linear terms have
    norm b r t^eta and a uniform kernel.
    """
    if nu < 1:
        raise ModelConstraintError("the Mackey-Glass exponent must be >= 1")
    p = t_pow(eta)
    linear = []
    for i in range(n):
        row = []
        for j in range(n):
            terms = [LinearTerm(t_pow(eta, b * r), uniform(r))]
            if i != j:
                terms.insert(0, LinearTerm(t_pow(eta, d_off), InstantPoint()))
            row.append(terms)
        linear.append(row)
    birth = KernelBirth((BirthTerm(t_pow(eta, beta_scale), MackeyGlass(const(c), nu), uniform(sigma)),))
    spec = make_system(
        [p * d_diag] * n,
        linear,
        [birth] * n,
        name="example3.2",
    )
    return ModelFixture(
        "example3.2",
        spec,
        expected={"H2": C_, "H2*": C_, "H5": C_, "H5*": C_},
        expected_blocking="a_ij unbounded with delays in the linear part",
        params={
            "n": n, "eta": eta, "d_diag": d_diag, "d_off": d_off, "b": b, "r": r,
            "beta_scale": beta_scale, "c": c, "nu": nu, "sigma": sigma,
        },
    )


def example_3_3(
    eta: float = 1.0,
    beta: float = 2.0,
    c: float = 1.0,
    nu: float = 1.0,
    linear_lag: float = 0.5,
    birth_lag: float = 1.0,
) -> ModelFixture:
    """
    x1' = -t^eta x1 + (t^eta - 1) x2(t - tau_1) + beta h(x1(t - sigma_1)), and
    symmetrically for x2, on t >= 1 with a Mackey-Glass h.
    linear_lag = 0 gives the variant without delays in the linear part.
    """
    if beta <= 1:
        raise ModelConstraintError("example 3.3 needs beta > 1")
    d = t_pow(eta).with_domain(1.0)
    a = (t_pow(eta) - 1.0).with_domain(1.0)
    kernels = None if linear_lag == 0 else [[None, linear_lag], [linear_lag, None]]
    nodelay = linear_lag == 0
    key = "example3.3-nodelay" if nodelay else "example3.3"
    spec = mackey_glass_system(
        d=[d, d],
        b=[[beta], [beta]],
        c=[[c], [c]],
        lags=[[birth_lag], [birth_lag]],
        alpha=nu,
        a=[[None, a], [a, None]],
        linear_kernels=kernels,
        domain_start=1.0,
        name=key,
    )
    return ModelFixture(
        key,
        spec,
        expected={"H2": C_, "H2*": U_, "H5": C_, "H5*": C_},
        expected_verdict=Outcome.PERMANENT if nodelay else Outcome.NO_VERDICT,
        expected_blocking=None if nodelay else "a_ij unbounded with delays in the linear part",
        scheme=Scheme.ETD4,
        params={"eta": eta, "beta": beta, "c": c, "nu": nu, "linear_lag": linear_lag, "birth_lag": birth_lag},
    )


def example_3_4(C: float = 2.0, mu: float = 0.5, mu1: float = 1.1, tau: float = 1.0) -> ModelFixture:
    """
    x' = -d x + a x(t - tau) + beta min(x, 1)^2 with a = mu (t + C - tau) / tau,
    beta = mu1 (t + C) / (t + C - 1), d = a + (beta + 1) / (t + C) + mu.
    The solution 1 / (t + C) decays although H2, H5 and H5* hold: h'(0) = 0.
    """
    if not C > max(tau, 1.0) or mu <= 0 or not mu1 > mu + 1.0 / C:
        raise ModelConstraintError("example 3.4 needs C > max(tau, 1), mu > 0 and mu1 > mu + 1/C")
    a = rational([mu * (C - tau) / tau, mu / tau])
    beta = rational([mu1 * C, mu1], [C - 1.0, 1.0])
    inv = _inverse_shift(C)
    d = a + (beta + 1.0) * inv + mu
    birth = KernelBirth((BirthTerm(beta, ClampedPower(2.0, 1.0)),))
    spec = make_system([d], [[LinearTerm(a, lag_point(tau))]], [birth], name="example3.4")
    return ModelFixture(
        "example3.4",
        spec,
        exact=ExactSolution((inv,), -tau),
        expected={"H2": C_, "H5": C_, "H5*": C_},
        expected_blocking="H4 fails: h-'(0+) = 0 for x1",
        scheme=Scheme.ETD4,
        params={"C": C, "mu": mu, "mu1": mu1, "tau": tau},
    )


def example_3_5(tau: float = 0.5, C: float = 1.0, mu: float = 1.0, a: float = 1.0) -> ModelFixture:
    """
    x_i' = -(a + d1) x_i + a x_j + beta h(x_i(t - tau)), h = x / (1 + x),
    d1 = mu (t + C) / (1 - tau), beta = (t + C + 1 - tau) / (t + C) * (d1 - 1 / (t + C)).
    Both components equal 1 / (t + C); beta is unbounded.
    """
    if not 0 < tau < 1 or not C > tau or mu <= 0 or a < 0:
        raise ModelConstraintError("example 3.5 needs 0 < tau < 1, C > tau, mu > 0 and a >= 0")
    k = mu / (1.0 - tau)
    d1 = rational([k * C, k])
    inv = _inverse_shift(C)
    beta = rational([C + 1.0 - tau, 1.0], [C, 1.0]) * (d1 - inv)
    coupling = const(a)
    decay = coupling + d1
    birth = KernelBirth((BirthTerm(beta, MackeyGlass(const(1.0), 1.0), lag_point(tau)),))
    spec = make_system(
        [decay, decay],
        [[None, LinearTerm(coupling)], [LinearTerm(coupling), None]],
        [birth, birth],
        name="example3.5",
    )
    return ModelFixture(
        "example3.5",
        spec,
        exact=ExactSolution((inv, inv), -tau),
        expected={"H2": C_, "H5": C_, "H5*": U_},
        expected_blocking="β unbounded",
        scheme=Scheme.ETD4,
        params={"tau": tau, "C": C, "mu": mu, "a": a},
    )


EXAMPLES = {
    "3.1": example_3_1,
    "3.2": example_3_2,
    "3.3": example_3_3,
    "3.4": example_3_4,
    "3.5": example_3_5,
}


def example_fixture(example_id: str, **params) -> ModelFixture:
    try:
        builder = EXAMPLES[example_id]
    except KeyError:
        raise ModelConstraintError(f"unknown example {example_id!r}, choose from {sorted(EXAMPLES)}") from None
    return builder(**params)

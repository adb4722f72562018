from enum import Enum

from dotenv import load_dotenv

from pydantic import BaseModel
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv(".env")


class Scheme(str, Enum):
    # classical fixed-step Runge-Kutta
    RK4 = "rk4"
    # exponential time differencing, diagonal decay treated exactly
    ETD4 = "etd4"


class IntegratorConfig(BaseModel):
    step: float = 1e-2
    scheme: Scheme = Scheme.RK4
    # NOTE: None disables the monitor (sign-indefinite linear tests)
    positivity_floor: float | None = 0.0
    max_steps: int = 5_000_000
    track_breakpoints: bool = True
    # Gauss-Legendre nodes per history panel for density kernels
    gauss_nodes: int = 2


class GridConfig(BaseModel):
    # "t >> 1" is read as "on every point of [t_check, t_max]"
    t_check: float = 10.0
    t_max: float = 1e4
    points: int = 400

    lp_epsilon: float = 1e-9
    feasibility_tol: float = 1e-12
    simplex_max_iterations: int = 20_000

    bisection_rel_tol: float = 1e-9
    alpha_cap: float = 1e6
    # strict ratio margin for (H2*) / (H5*)
    alpha_margin: float = 1e-6
    # log-log tail slope below which a margin counts as vanishing
    vanishing_slope: float = -0.5
    # log-log tail slope above which a sampled function counts as unbounded
    growth_slope: float = 0.05


class EnvelopeConfig(BaseModel):
    # monotone shapes (Mackey-Glass with alpha = 1) are capped here
    monotone_cap_limit: float = 1e6
    kernel_mass_tol: float = 1e-10
    kernel_check_start: float = 0.0
    kernel_check_stop: float = 100.0
    kernel_check_points: int = 11


class EnsembleConfig(BaseModel):
    size: int = 50
    seed: int = 20200401
    low: float = 1e-3
    high: float = 10.0
    transient_fraction: float = 0.5
    # late/early post-transient minimum ratio below 1 - drift counts as decay
    drift_tolerance: float = 0.1
    # NOTE: members are independent, set to 1 to run them one by one
    max_workers: int = 4


class ExperimentsConfig(BaseModel):
    residual_tolerance: float = 1e-6
    residual_points: int = 1000
    horizon: float = 200.0
    comparison_tolerance: float = 1e-6
    # sup-norm window at the end of each extinction horizon
    extinction_window: float = 10.0
    fit_points: int = 200


class OutputConfig(BaseModel):
    out_dir: str = "results"
    json_indent: int = 2


class Config(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="DPT_", env_nested_delimiter="__")

    log_level: str = "INFO"

    integrator: IntegratorConfig = IntegratorConfig()
    grid: GridConfig = GridConfig()
    envelope: EnvelopeConfig = EnvelopeConfig()
    ensemble: EnsembleConfig = EnsembleConfig()
    experiments: ExperimentsConfig = ExperimentsConfig()
    output: OutputConfig = OutputConfig()


settings = Config()

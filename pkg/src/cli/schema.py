"""
Spec-file schema (version 1) and per-run parameters.

Coefficients use the expression trees of src.timefn.codec; kernels, shapes,
birth terms and harvest shapes are tagged by "kind".
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import Scheme, settings
from src.errors import UsageError
from src.timefn.codec import ExprOrNumber


class Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class InstantKernel(Model):
    kind: Literal["instant"] = "instant"


class LagKernel(Model):
    kind: Literal["lag"]
    lag: ExprOrNumber


class DensityKernel(Model):
    kind: Literal["density"]
    density: ExprOrNumber
    support: ExprOrNumber


class UniformKernel(Model):
    kind: Literal["uniform"]
    width: ExprOrNumber


Kernel = Annotated[
    Union[InstantKernel, LagKernel, DensityKernel, UniformKernel],
    Field(discriminator="kind"),
]


class NicholsonShape(Model):
    kind: Literal["nicholson"]
    c: ExprOrNumber


class MackeyGlassShape(Model):
    kind: Literal["mackey_glass"]
    c: ExprOrNumber
    alpha: float = Field(default=1.0, ge=1.0)


class ClampedPowerShape(Model):
    kind: Literal["clamped_power"]
    p: float = Field(gt=0)
    cap: float = Field(gt=0)
    scale: float = Field(default=1.0, gt=0)


class WindowClampShape(Model):
    kind: Literal["window_clamp"]
    inner: ShapeModel
    m: float = Field(gt=0)


class PointwiseMinShape(Model):
    kind: Literal["pointwise_min"]
    parts: list[ShapeModel] = Field(min_length=1)


ShapeModel = Annotated[
    Union[NicholsonShape, MackeyGlassShape, ClampedPowerShape, WindowClampShape, PointwiseMinShape],
    Field(discriminator="kind"),
]


class BirthTermModel(Model):
    coef: ExprOrNumber
    shape: ShapeModel
    kernel: Kernel = Field(default_factory=InstantKernel)


class KernelBirthModel(Model):
    kind: Literal["kernel_birth"]
    terms: list[BirthTermModel] = Field(min_length=1)


class DistributedTermModel(Model):
    b: ExprOrNumber
    lam: ExprOrNumber
    lag: ExprOrNumber
    shape: ShapeModel


class DistributedBirthModel(Model):
    kind: Literal["distributed_birth"]
    terms: list[DistributedTermModel] = Field(min_length=1)
    evaluation_time: Literal["s", "t"] = "s"


class WindowMinBirthModel(Model):
    kind: Literal["window_min_birth"]
    beta: ExprOrNumber
    shape: ShapeModel
    window: float = Field(ge=0)


BirthModel = Annotated[
    Union[KernelBirthModel, DistributedBirthModel, WindowMinBirthModel],
    Field(discriminator="kind"),
]


class HarvestPowerShape(Model):
    kind: Literal["power"]
    p: float


class HarvestHillShape(Model):
    kind: Literal["hill"]
    p: float
    k: float


class HarvestModel(Model):
    kappa: ExprOrNumber
    shape: Annotated[Union[HarvestPowerShape, HarvestHillShape], Field(discriminator="kind")]


class LinearModel(Model):
    a: ExprOrNumber
    kernel: Kernel = Field(default_factory=InstantKernel)


class SolutionModel(Model):
    components: list[ExprOrNumber] = Field(min_length=1)
    valid_from: float = 0.0


class IntegratorHint(Model):
    scheme: Scheme = Scheme.RK4
    step: float = Field(gt=0)


class SpecFile(Model):
    version: Literal[1]
    name: str = ""
    n: int = Field(ge=1)
    tau: float | None = Field(default=None, ge=0)
    domain_start: float = 0.0
    d: list[ExprOrNumber]
    L: list[list[LinearModel | list[LinearModel] | None]] | None = None
    f: list[BirthModel | None] | None = None
    K: list[HarvestModel | None] | None = None
    # "d1".."dn" -> (inf, sup) of the decay coefficients
    declared_bounds: dict[str, tuple[float, float]] = Field(default_factory=dict)
    initial: list[ExprOrNumber] | None = None
    solution: SolutionModel | None = None
    integrator: IntegratorHint | None = None

    @model_validator(mode="after")
    def _sizes(self) -> SpecFile:
        n = self.n
        if len(self.d) != n:
            raise ValueError(f"d needs {n} entries, got {len(self.d)}")
        if self.L is not None and (len(self.L) != n or any(len(row) != n for row in self.L)):
            raise ValueError(f"L must be an {n} x {n} matrix")
        for key, values in (("f", self.f), ("K", self.K), ("initial", self.initial)):
            if values is not None and len(values) != n:
                raise ValueError(f"{key} needs {n} entries, got {len(values)}")
        if self.solution is not None and len(self.solution.components) != n:
            raise ValueError(f"solution needs {n} components, got {len(self.solution.components)}")
        return self


for _model in (
    WindowClampShape,
    PointwiseMinShape,
    BirthTermModel,
    KernelBirthModel,
    DistributedTermModel,
    DistributedBirthModel,
    WindowMinBirthModel,
    SpecFile,
):
    _model.model_rebuild()


class RunConfig(BaseModel):
    """Per-run parameters; unset fields fall back to settings."""

    t_check: float = Field(default_factory=lambda: settings.grid.t_check, gt=0)
    t_max: float = Field(default_factory=lambda: settings.grid.t_max, gt=0)
    # check grid K, or residual points for verify; None keeps the configured default
    points: int | None = Field(default=None, ge=2)
    step: float | None = Field(default=None, gt=0)
    scheme: Scheme | None = None
    horizon: float = Field(default_factory=lambda: settings.experiments.horizon, gt=0)
    ensemble: int = Field(default_factory=lambda: settings.ensemble.size, ge=1)
    seed: int = Field(default_factory=lambda: settings.ensemble.seed)
    out_dir: str = Field(default_factory=lambda: settings.output.out_dir)
    json_output: bool = False
    reverify: int | None = Field(default=None, ge=2)
    tolerance: float = Field(default_factory=lambda: settings.experiments.residual_tolerance, gt=0)

    @model_validator(mode="after")
    def _grid(self) -> RunConfig:
        if self.t_max <= self.t_check:
            raise ValueError(f"tmax={self.t_max} must exceed tcheck={self.t_check}")
        return self

    def check_step(self, step: float, tau: float) -> None:
        if tau > 0 and step > tau / 4.0 * (1 + 1e-12):
            raise UsageError(f"step {step:g} exceeds tau/4 = {tau / 4.0:g}")

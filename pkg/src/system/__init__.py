__all__ = [
    "History",
    "FunctionHistory",
    "InstantPoint",
    "LagPoint",
    "Density",
    "UniformDensity",
    "DelayKernel",
    "lag_point",
    "uniform",
    "kernel_mass",
    "Shape",
    "Nicholson",
    "MackeyGlass",
    "ClampedPower",
    "WindowClamp",
    "PointwiseMin",
    "HarvestPower",
    "HarvestHill",
    "BirthTerm",
    "KernelBirth",
    "DistributedTerm",
    "DistributedBirth",
    "WindowMinBirth",
    "CustomEnvelope",
    "Nonlinearity",
    "nonlinearity_eval",
    "LinearTerm",
    "HarvestTerm",
    "SystemSpec",
    "make_system",
    "linear_term_eval",
    "has_linear_delays",
    "rhs_eval",
    "Envelope",
    "beta_of",
    "lower_envelope",
    "upper_envelope",
    "scale_system",
    "build_cooperative_lower",
]

from src.system.envelope import Envelope, beta_of, lower_envelope, upper_envelope
from src.system.history import FunctionHistory, History
from src.system.kernels import (
    DelayKernel,
    Density,
    InstantPoint,
    LagPoint,
    UniformDensity,
    kernel_mass,
    lag_point,
    uniform,
)
from src.system.nonlinearity import (
    BirthTerm,
    CustomEnvelope,
    DistributedBirth,
    DistributedTerm,
    KernelBirth,
    Nonlinearity,
    WindowMinBirth,
    nonlinearity_eval,
)
from src.system.shapes import (
    ClampedPower,
    HarvestHill,
    HarvestPower,
    MackeyGlass,
    Nicholson,
    PointwiseMin,
    Shape,
    WindowClamp,
)
from src.system.spec import (
    HarvestTerm,
    LinearTerm,
    SystemSpec,
    has_linear_delays,
    linear_term_eval,
    make_system,
    rhs_eval,
)
from src.system.transforms import build_cooperative_lower, scale_system

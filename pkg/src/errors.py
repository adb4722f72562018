class ToolkitError(Exception):
    """Root of every error raised by the toolkit."""


class DomainError(ToolkitError, ValueError):
    """A coefficient function was evaluated before its domain start."""


class NonFiniteError(ToolkitError, ArithmeticError):
    """A composition tree produced inf or nan."""


class InconsistentBoundsError(ToolkitError, ValueError):
    """Sampled values escaped the bounds declared by the model builder."""


class ModelConstraintError(ToolkitError, ValueError):
    """A model violates a standing sign, size or delay constraint."""


class EnvelopeError(ToolkitError, ValueError):
    """Envelope data (beta, h-) is missing or cannot be built."""


class HistoryGapError(ToolkitError, LookupError):
    """History was requested outside the covered span."""


class NegativeHistoryError(ToolkitError, ArithmeticError):
    """A birth term saw a negative history value."""


class IntegrationError(ToolkitError):
    """Numerical failure while integrating."""


class PositivityError(IntegrationError):
    def __init__(self, time: float, component: int, value: float):
        self.time = time
        self.component = component
        self.value = value
        super().__init__(
            f"component x{component + 1} crossed the positivity floor at t={time:.6g} "
            f"(value {value:.6g})"
        )


class StepBoundError(IntegrationError, ValueError):
    """Step size violates 0 < h <= tau/4."""


class MaxStepsExceeded(IntegrationError):
    """The requested horizon needs more steps than allowed."""


class ExplicitnessError(IntegrationError):
    """The committed history was read beyond the current step start."""


class SimplexCyclingError(ToolkitError):
    """The simplex iteration guard was exceeded."""


class SpecFileError(ToolkitError, ValueError):
    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class UsageError(ToolkitError, ValueError):
    """Bad command-line arguments or run parameters."""

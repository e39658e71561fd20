"""Exception types shared across the package."""


class FiegarchError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FiegarchError, ValueError):
    """Argument outside the mathematical domain of a function."""


class HorizonError(FiegarchError, ValueError):
    """Requested coefficient horizon exceeds the configured maximum."""


class DegenerateModelError(FiegarchError, ValueError):
    """Model with theta = gamma = 0 has no news-impact noise."""


class SimulationError(FiegarchError, RuntimeError):
    """Non-finite conditional variance produced while simulating."""


class FilterError(FiegarchError, RuntimeError):
    """Non-finite conditional variance produced while filtering data."""


class SamplerStateError(FiegarchError, RuntimeError):
    """Chain state has a non-finite log target density."""


class InitializationError(FiegarchError, RuntimeError):
    """No grid point produced a finite log-likelihood."""


class HyperparameterError(FiegarchError, ValueError):
    """Truth-pinned hyperparameters requested at a support boundary."""

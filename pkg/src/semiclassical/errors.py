"""
Exception hierarchy for the semiclassical library.
"""


class GWPError(Exception):
    """Base class for every error raised by the library."""


class DimensionError(GWPError, ValueError):
    """Operands have incompatible shapes."""


class GeometryError(GWPError, ValueError):
    """A matrix fails symmetry, definiteness, symplecticity or orthogonality."""


class ConstraintViolation(GeometryError):
    """A Hagedorn (Q, P) pair violates its constraints or Q is singular."""


class PotentialError(GWPError):
    """A potential cannot supply the requested derivative or average."""


class BracketError(GWPError, ValueError):
    """The semiclassical bracket is undefined for the given parameters."""


class ConfigError(GWPError, ValueError):
    """An experiment configuration is malformed."""


class NumericalFailure(GWPError, RuntimeError):
    """
    A trajectory became invalid while integrating.

    Args:
        message (str): What went wrong
        step (int): Index of the step that produced the invalid state
        time (float): Time reached before the failing step
    """

    def __init__(self, message, step, time=None):
        super().__init__(f"step {step}: {message}")
        self.step = step
        self.time = time


class InvariantViolation(GWPError):
    """
    A conservation or geometry check exceeded its threshold.

    Args:
        quantity (str): Name of the checked quantity
        observed (float): Observed value
        threshold (float): Threshold it was compared against
    """

    def __init__(self, quantity, observed, threshold):
        super().__init__(
            f"{quantity}: observed {observed:.3e}, threshold {threshold}"
        )
        self.quantity = quantity
        self.observed = observed
        self.threshold = threshold

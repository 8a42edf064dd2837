from typing import Optional


class ActuatorError(Exception):
    """Base class for every error raised by the toolkit"""


class ValidationError(ActuatorError, ValueError):
    """
    Raised when an input violates a type invariant or a file cannot be parsed

    Args:
        message: Human readable description
        field: Offending config field, if known
        row: 1-based data row of a CSV file, if known
        line: 1-based text line of a JSON document, if known
    """

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        row: Optional[int] = None,
        line: Optional[int] = None,
    ):
        super().__init__(message)
        self.field = field
        self.row = row
        self.line = line


class NumericalError(ActuatorError, RuntimeError):
    """Raised when a computation has no valid numerical answer"""


class NoRootError(NumericalError):
    """Force balance has no sign change inside the search bracket"""


class RankDeficiencyError(NumericalError):
    """Least-squares design matrix is too ill-conditioned to solve"""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class DivergenceError(NumericalError):
    """Simulation state left the finite range"""

    def __init__(self, message: str, time_s: float):
        super().__init__(message)
        self.time_s = time_s


class NoCrossingError(NumericalError):
    """Magnitude curve never falls to the -3 dB level"""


class StraightActuatorError(NumericalError):
    """Zero differential extension: the actuator does not bend"""

    straight = True

"""Exception types shared across the package.

The CLI maps these onto process exit codes: config problems exit 2,
numerical degeneracies exit 3, file I/O failures exit 4.
"""


class BeamsyncError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(BeamsyncError, ValueError):
    """A function argument violates its documented precondition."""


class ConfigError(BeamsyncError):
    """A scenario/sweep configuration is malformed or inconsistent."""


class DegenerateStatisticError(BeamsyncError):
    """An estimator hit a numerically void statistic (magnitude below floor)."""


class RankDeficiencyError(BeamsyncError):
    """A least-squares block lost column rank.

    Carries the frame index so the failing block can be reported.
    """

    def __init__(self, message, frame=None):
        super().__init__(message)
        self.frame = frame


class WindowError(BeamsyncError, IndexError):
    """A correlation window falls outside the observed burst."""


class StepInstabilityError(BeamsyncError):
    """Finite-difference derivatives disagree beyond tolerance."""


class BurstIOError(BeamsyncError, OSError):
    """Reading or writing a burst file failed."""

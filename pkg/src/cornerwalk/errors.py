"""Exception types shared across the package."""


class CornerwalkError(Exception):
    """Base class for all package-specific errors."""


class SequenceError(CornerwalkError):
    """A scale sequence violates its bounds or is malformed."""


class AddressError(CornerwalkError):
    """A cylinder address contains symbols outside 1..4 or has the wrong length."""


class ParameterError(CornerwalkError):
    """Engine or oracle parameters fail their validity checks."""


class StepLimitExceeded(CornerwalkError):
    """A single walker exceeded the per-walker step budget."""


class DiscardBudgetExceeded(CornerwalkError):
    """Too large a fraction of walkers hit the step limit for the campaign to be trusted."""


class InsufficientCounts(CornerwalkError):
    """A statistic was requested on cells whose counts fall below the floor."""


class UndefinedConditional(CornerwalkError):
    """Conditional probability requested against an empty base cell."""


class CostGuardError(CornerwalkError):
    """A requested oracle run exceeds the sizes the slow reference path is meant for."""

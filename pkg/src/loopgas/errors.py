"""Exception hierarchy with stable machine-readable categories.

The ``category`` attribute is what the CLI prints and maps to exit codes,
so it must stay stable across releases.
"""


class LoopgasError(Exception):
    category = "error"


class SizeError(LoopgasError):
    """Requested size is out of range (p = 0 is rejected everywhere)."""

    category = "size"


class StructuralError(LoopgasError):
    """Malformed map, tree, or serialized data."""

    category = "structural"


class CapacityError(LoopgasError):
    """Request exceeds a configured resource cap."""

    category = "capacity"


class StatisticsError(LoopgasError):
    """Estimator preconditions not met (e.g. fewer than two samples)."""

    category = "statistics"


class SeriesError(LoopgasError):
    """Size series has gaps or is otherwise unusable."""

    category = "series"


class DomainError(LoopgasError):
    """Argument outside the mathematical domain of a formula."""

    category = "domain"


class UnderdeterminedError(LoopgasError):
    """Too few data points for the requested fit."""

    category = "underdetermined"


class WeightError(LoopgasError):
    """Non-positive error bars cannot be used as fit weights."""

    category = "weight"


class ConditioningError(LoopgasError):
    """Design matrix is rank deficient or numerically unusable."""

    category = "conditioning"

"""Exception types raised by csrgame."""


class CSRError(Exception):
    """Base class for all csrgame errors."""


class ValidationError(CSRError, ValueError):
    """Malformed graph, instance, allocation or input file."""


class GraphError(ValidationError):
    pass


class AllocationError(ValidationError):
    pass


class BudgetExceededError(CSRError):
    """Raised when an exhaustive enumeration would exceed its budget."""

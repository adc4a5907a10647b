"""Exception hierarchy shared by every dflregret module."""


class DflRegretError(Exception):
    """Base class for all dflregret errors."""
    pass


class MalformedProblem(DflRegretError):
    """LP data with inconsistent dimensions or invalid senses."""
    pass


class NumericalFailure(DflRegretError):
    """Simplex exceeded its iteration cap or lost its basis factorization."""
    pass


class InfeasibleProblem(DflRegretError):
    """An optimum was required but the LP has no feasible point."""
    pass


class UnboundedProblem(DflRegretError):
    """An optimum was required but the LP objective is unbounded."""
    pass


class InvalidDimension(DflRegretError):
    """Graph or polytope constructor called with impossible sizes."""
    pass


class InvalidParam(DflRegretError):
    """A numeric parameter is outside its admissible range."""
    pass


class SchemaError(DflRegretError):
    """Dataset or model file does not match the expected schema/version."""
    pass


class DatasetIoError(DflRegretError, OSError):
    """Reading or writing a dataset/model file failed."""
    pass


class DegenerateNormalization(DflRegretError):
    """Sum of true optimal values is too close to zero to normalize by."""
    pass


class TimeBudgetExceeded(DflRegretError):
    """A solve that had to finish ran past its wall-clock deadline."""
    pass

"""Exception hierarchy shared by every qfock module."""


class QFockError(Exception):
    """Base class for all library errors."""


class InputError(QFockError):
    """Malformed or inconsistent input (CLI exit code 2)."""


class OverlappingIntervals(InputError):
    pass


class EmptyInterval(InputError):
    pass


class IncompatiblePartitions(InputError):
    pass


class NonpositivePower(InputError):
    pass


class UnknownCellId(InputError):
    pass


class NonRationalInput(InputError):
    pass


class NotHermitian(InputError):
    pass


class ParseError(InputError):
    pass


class DomainViolation(QFockError):
    """A test function lies outside the region where a quantity is defined."""


class NoConvergenceWithinBudget(QFockError):
    """Series tail bound still above tolerance after ``n_max`` orders."""


class OracleBudgetExceeded(QFockError):
    """Symbolic expansion exceeded its order cap or term cap."""

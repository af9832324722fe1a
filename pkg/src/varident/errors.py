"""Exception hierarchy shared by all modules."""


class VarIdentError(Exception):
    """Base class for domain errors raised by :mod:`varident`."""


class InputError(VarIdentError, ValueError):
    """Malformed or out-of-range input."""


class PreconditionError(InputError):
    """An operation was called outside the case it is defined for."""


class SingularSystemError(VarIdentError, ArithmeticError):
    """``I - L (x) L`` is numerically singular; draw new parameters and retry."""

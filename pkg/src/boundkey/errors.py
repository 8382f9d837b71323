"""Exception types raised across the package."""


class BoundKeyError(Exception):
    """Base class for all package errors."""


class LoadError(BoundKeyError, ValueError):
    """Input data is malformed or not a probability distribution."""


class AmbiguousEve(BoundKeyError):
    pass


class SupportMismatch(BoundKeyError, ValueError):
    pass


class DimensionMismatch(BoundKeyError, ValueError):
    pass


class InvalidDiagram(BoundKeyError, ValueError):
    pass


class NotUnambiguous(BoundKeyError, ValueError):
    pass


class EigenFailure(BoundKeyError, ArithmeticError):
    pass


class DomainError(BoundKeyError, ValueError):
    pass


class NoFeasiblePoint(BoundKeyError):
    pass


class SizeGuard(BoundKeyError, ValueError):
    pass


class NoneFound(BoundKeyError):
    pass


class NotIsometry(BoundKeyError, ValueError):
    pass

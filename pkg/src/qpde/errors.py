"""Exception types raised by the engine."""


class QPDEError(Exception):
    """Base class for all engine errors."""


class DivisionByZero(QPDEError, ZeroDivisionError):
    pass


class IncompatibleVariables(QPDEError, ValueError):
    pass


class NonInvertibleLeadingTerm(QPDEError, ArithmeticError):
    pass


class ThetaDenominatorVanishes(NonInvertibleLeadingTerm):
    pass


class OrderExceedsTruncation(QPDEError, ValueError):
    pass


class UnknownIdentity(QPDEError, KeyError):
    def __str__(self):
        return f"unknown identity: {self.args[0]!r}"


class MissingParams(QPDEError, ValueError):
    pass


class LimitExceeded(QPDEError, ValueError):
    pass


class InvalidModulus(QPDEError, ValueError):
    pass


class ToleranceUnreachable(QPDEError, ArithmeticError):
    pass


class PoleProximity(QPDEError, ValueError):
    pass

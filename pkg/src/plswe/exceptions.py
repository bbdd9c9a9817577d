"""Exception hierarchy for the package.

Every error raised on purpose derives from :class:`PLSError`, so callers
driving batches of trials can catch one type.
"""


class PLSError(Exception):
    pass


# algebra
class NotPrimeError(PLSError, ValueError):
    pass


class ZeroInverse(PLSError, ZeroDivisionError):
    pass


class DivisionByZero(PLSError, ZeroDivisionError):
    pass


class InexactDivision(PLSError, ArithmeticError):
    pass


class BothZero(PLSError, ValueError):
    pass


class AllZero(PLSError, ValueError):
    pass


# bounds
class RateOutOfRange(PLSError, ValueError):
    pass


class NoFixedPoint(PLSError, RuntimeError):
    pass


# keyeq
class EmptySolutionSpace(PLSError):
    pass


class RankAboveOne(PLSError):
    pass


class CertificationFailed(PLSError):
    pass


class ZeroDenominator(PLSError):
    pass


# instance
class FieldTooSmall(PLSError, ValueError):
    pass


class DegenerateSystem(PLSError):
    pass


class RankDropPoint(PLSError, ValueError):
    pass


class SingularSystem(PLSError, ValueError):
    pass


# errors
class SupportOutOfRange(PLSError, IndexError):
    pass


class DenominatorVanishes(PLSError, ValueError):
    pass


class SingularEvaluation(PLSError, ValueError):
    pass


# earlyterm
class BudgetViolated(PLSError, AssertionError):
    pass


class MaxLExceeded(PLSError, RuntimeError):
    pass

"""Exception hierarchy shared by every module."""


class RootLabError(Exception):
    """Base class for all errors raised by nsroots."""


class ParseError(RootLabError, ValueError):
    pass


class UnsupportedOrder(RootLabError, ValueError):
    pass


class EvalError(RootLabError):
    """A function could not be evaluated at the requested point."""


class DomainError(EvalError):
    """Argument outside the function's domain (pole, log of a non-positive number)."""


class StepError(RootLabError):
    """An iteration step hit a zero denominator or an inadmissible value."""


class DerivativeZero(StepError):
    pass


class SecantDegenerate(StepError):
    pass


class DegenerateNodes(StepError):
    pass


class WeightPole(StepError):
    pass


class ApproxDerivativeZero(StepError):
    pass


class DegenerateStep(StepError):
    """Zero denominator inside a comparator formula; ``where`` names the sub-expression."""

    def __init__(self, where):
        super().__init__(f"zero denominator in {where}")
        self.where = where


class AtRoot(StepError):
    """Raised by helpers that cannot proceed because f(x) is exactly zero."""


class NotSimpleRoot(RootLabError):
    pass


class InsufficientData(RootLabError):
    pass


class ExactRootReached(InsufficientData):
    pass

"""Exception hierarchy shared by every statdiff module."""

from __future__ import annotations


class StatDiffError(Exception):
    """Base class for all errors raised by statdiff."""


class ExpressionSyntaxError(StatDiffError, ValueError):
    """Malformed expression text.

    ``offset`` is the byte offset (UTF-8) into the source text where parsing
    stopped.
    """

    def __init__(self, message: str, offset: int, text: str = "") -> None:
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset
        self.text = text


class NonIntegerExponent(ExpressionSyntaxError):
    """Raised for ``x^0.5`` and friends; write ``exp(0.5*ln(x))`` instead."""


class DomainError(StatDiffError, ValueError):
    """A function was evaluated outside its natural domain."""


class InvalidDistribution(StatDiffError, ValueError):
    """Distribution parameters or the distribution string are invalid."""


class QuadratureFailure(StatDiffError, ArithmeticError):
    """Adaptive integration could not reach the requested tolerance."""


class NonFinite(StatDiffError, ArithmeticError):
    """An integrand or sample evaluated to inf or nan."""


class HypothesisFailure(StatDiffError):
    """A bound's applicability hypotheses do not hold.

    The assembled (inapplicable) bound is attached as ``bound`` so callers
    that want a report rather than an exception can still use it.
    """

    def __init__(self, message: str, bound=None) -> None:
        super().__init__(message)
        self.bound = bound

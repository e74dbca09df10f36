"""Exception hierarchy shared by every engine."""

from __future__ import annotations


class HSConvexError(Exception):
    """Base class for all toolkit errors."""


class UsageError(HSConvexError, ValueError):
    """Malformed arguments: bad ranges, p <= 1, missing parameters."""


class ExprSyntaxError(HSConvexError, ValueError):
    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at byte offset {offset}{detail}")


class MultipleVariablesError(HSConvexError, ValueError):
    def __init__(self, names: tuple[str, ...]):
        self.names = names
        super().__init__(f"expression uses more than one variable: {', '.join(names)}")


class EvalError(HSConvexError, ArithmeticError):
    """Evaluation failure. ``kind`` is DomainViolation, NonFinite or NotDifferentiable."""

    DOMAIN = "DomainViolation"
    NON_FINITE = "NonFinite"
    NOT_DIFFERENTIABLE = "NotDifferentiable"

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class NotDifferentiableError(EvalError):
    def __init__(self, message: str):
        super().__init__(EvalError.NOT_DIFFERENTIABLE, message)


class KernelError(HSConvexError, ValueError):
    """The (h, s) pair is inadmissible."""


class KernelDomainError(HSConvexError, ArithmeticError):
    """h is undefined or negative at the requested point."""

    def __init__(self, t: float, message: str):
        self.t = t
        super().__init__(f"kernel undefined at t={t!r}: {message}")


class QuadratureDivergence(HSConvexError, ArithmeticError):
    pass


class PreconditionError(HSConvexError, ValueError):
    NEGATIVE_FUNCTION = "NegativeFunction"

    def __init__(self, reason: str, message: str, x: float | None = None):
        self.reason = reason
        self.x = x
        super().__init__(f"{reason}: {message}")


class HypothesisNotMet(HSConvexError):
    def __init__(self, failed: list[str], detail: str = ""):
        self.failed = list(failed)
        msg = "hypothesis not met: " + ", ".join(self.failed)
        super().__init__(msg + (f" ({detail})" if detail else ""))


class MeanDomainError(HSConvexError, ValueError):
    pass

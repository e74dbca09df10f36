"""Numerical checks for (h-s)-convex functions and Hermite-Hadamard-type bounds."""

__version__ = "0.1.0"

from .config import DEFAULTS, Defaults
from .errors import (EvalError, ExprSyntaxError, HSConvexError, HypothesisNotMet, KernelDomainError, KernelError,
                     MeanDomainError, MultipleVariablesError, NotDifferentiableError, PreconditionError,
                     QuadratureDivergence, UsageError)
from .expr import FunctionExpr, differentiate, evaluate, parse
from .kernels import HKernel, hs_eval, k_constant
from .quadrature import QuadResult, integrate, integrate_kink_aware

__all__ = [
    "DEFAULTS", "Defaults", "EvalError", "ExprSyntaxError", "FunctionExpr", "HKernel", "HSConvexError",
    "HypothesisNotMet", "KernelDomainError", "KernelError", "MeanDomainError", "MultipleVariablesError",
    "NotDifferentiableError", "PreconditionError", "QuadResult", "QuadratureDivergence", "UsageError",
    "differentiate", "evaluate", "hs_eval", "integrate", "integrate_kink_aware", "k_constant", "parse",
]

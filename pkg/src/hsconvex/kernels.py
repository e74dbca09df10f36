"""The (h, s) kernel pair and its normalising constant K = int_0^1 h(t)^s dt."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import DEFAULTS
from .errors import EvalError, KernelDomainError, KernelError, QuadratureDivergence
from .expr import FunctionExpr, Var, parse
from .quadrature import QuadResult, integrate

_ADMISSIBILITY_POINTS = 65


@dataclass(frozen=True)
class HKernel:
    """Kernel ``h`` (an expression in one variable, usually ``t``) with exponent ``s``.

    Construction checks ``s`` in (0, 1] and samples ``h**s`` on
    ``[eval_epsilon, 1 - eval_epsilon]``: every sample must be finite and
    nonnegative, and not all of them zero.
    """

    h: FunctionExpr
    s: float
    eval_epsilon: float = DEFAULTS.eval_epsilon

    def __post_init__(self):
        if not (0.0 < self.s <= 1.0):
            raise KernelError(f"s must lie in (0, 1], got {self.s!r}")
        if not (0.0 < self.eval_epsilon < 0.5):
            raise KernelError(f"eval_epsilon must lie in (0, 0.5), got {self.eval_epsilon!r}")
        lo, hi = self.eval_epsilon, 1.0 - self.eval_epsilon
        n = _ADMISSIBILITY_POINTS
        values = [self.hs(lo + (hi - lo) * i / (n - 1)) for i in range(n)]
        if all(v == 0.0 for v in values):
            raise KernelError(f"h = {self.h} vanishes identically on the sampled (0, 1)")

    @classmethod
    def from_text(cls, h: str, s: float, eval_epsilon: float = DEFAULTS.eval_epsilon) -> "HKernel":
        return cls(parse(h), float(s), eval_epsilon)

    def h_eval(self, t: float) -> float:
        try:
            value = self.h(t)
        except EvalError as exc:
            raise KernelDomainError(t, str(exc)) from None
        if value < 0:
            raise KernelDomainError(t, f"h(t) = {value!r} is negative")
        return value

    def hs(self, t: float) -> float:
        """``h(t)**s``; raises :class:`KernelDomainError` where h is undefined or negative."""
        value = self.h_eval(t)
        if self.s == 1.0:
            return value
        result = math.pow(value, self.s)
        if not math.isfinite(result):
            raise KernelDomainError(t, f"h(t)^s = {result!r} is not finite")
        return result

    @property
    def is_identity(self) -> bool:
        """True when h is literally the variable itself (h(t) = t)."""
        return isinstance(self.h.root, Var)

    def describe(self) -> dict:
        return {"h": str(self.h), "s": self.s, "eval_epsilon": self.eval_epsilon}

    def evaluable_at(self, t: float) -> bool:
        try:
            self.hs(t)
        except KernelDomainError:
            return False
        return True

    def t_range(self) -> tuple[float, float]:
        """[0, 1] with each endpoint pulled in to the guard where the kernel is undefined."""
        lo = 0.0 if self.evaluable_at(0.0) else self.eval_epsilon
        hi = 1.0 if self.evaluable_at(1.0) else 1.0 - self.eval_epsilon
        return lo, hi


def hs_eval(kernel: HKernel, t: float) -> float:
    return kernel.hs(t)


def k_constant(kernel: HKernel, tol: float = DEFAULTS.quad_tol,
               budget: int = DEFAULTS.quad_budget) -> QuadResult:
    """K with an error estimate, cross-checked against the reflected integral.

    The reflected integral of ``h**s(1 - t)`` must agree with K within
    ``2*tol``.  When the kernel is singular at 0 the reflected integrand is
    singular at t = 1, where doubles are spaced about 1e-16 apart and the
    integral cannot be resolved past roughly the square root of that spacing.
    In that case the result carries a note with the observed discrepancy
    instead of failing.
    """
    direct = integrate(kernel.hs, 0.0, 1.0, tol, budget)
    if not direct.converged:
        raise QuadratureDivergence(f"K did not converge within {budget} evaluations: error {direct.error:.3g}")
    try:
        reflected = integrate(lambda t: kernel.hs(1.0 - t), 0.0, 1.0, tol, budget)
    except (QuadratureDivergence, KernelDomainError) as exc:
        note = f"reflection check limited by floating-point resolution near t=1 ({exc})"
        return QuadResult(direct.value, direct.error, direct.evaluations, True, note)
    gap = abs(direct.value - reflected.value)
    if gap > 2 * tol:
        if reflected.converged:
            raise QuadratureDivergence(
                f"K = {direct.value!r} disagrees with reflected integral {reflected.value!r} by {gap:.3g}")
        note = f"reflected integral unconverged; |difference| = {gap:.3g}"
        return QuadResult(direct.value, direct.error, direct.evaluations + reflected.evaluations, True, note)
    return QuadResult(direct.value, direct.error, direct.evaluations + reflected.evaluations, True, "")

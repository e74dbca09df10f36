"""Special means of two positive numbers and checkers for the mean inequalities."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .config import DEFAULTS, Defaults
from .errors import MeanDomainError, UsageError
from .expr import parse
from .hh import (INCONCLUSIVE, STATED, PROOF, Bound, BoundChainReport, IntervalSpec, make_bound,
                 trapezoid_lhs, verify_holder_bound, verify_linear_kernel_bound)
from .kernels import HKernel

KINDS = ("arithmetic", "harmonic", "logarithmic", "power", "generalized-log")
ALIASES = {"A": "arithmetic", "H": "harmonic", "L": "logarithmic", "Ap": "power", "Ln": "generalized-log"}
PROPOSITIONS = ("p31", "p32", "p33")


@dataclass(frozen=True)
class MeanKind:
    kind: str
    order: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown mean {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind in ("power", "generalized-log"):
            if self.order is None or not math.isfinite(self.order):
                raise UsageError(f"{self.kind} mean needs a finite order")
            if self.kind == "power" and self.order == 0:
                raise UsageError("power mean order must be nonzero")
            if self.kind == "generalized-log" and self.order in (0, -1):
                raise UsageError("generalized logarithmic mean order must not be 0 or -1")

    @classmethod
    def parse(cls, name: str, order: Optional[float] = None) -> "MeanKind":
        return cls(ALIASES.get(name, name), order)


def _sorted_pair(a: float, b: float) -> tuple[float, float]:
    if not (math.isfinite(a) and math.isfinite(b)):
        raise MeanDomainError(f"means need finite arguments, got {a!r}, {b!r}")
    return (a, b) if a <= b else (b, a)


def arithmetic(a: float, b: float) -> float:
    a, b = _sorted_pair(a, b)
    return 0.5 * (a + b)


def harmonic(a: float, b: float) -> float:
    a, b = _sorted_pair(a, b)
    if a <= 0:
        raise MeanDomainError(f"harmonic mean needs a, b > 0, got {a!r}, {b!r}")
    return 2.0 * a * b / (a + b)


def logarithmic(a: float, b: float) -> float:
    a, b = _sorted_pair(a, b)
    if a <= 0:
        raise MeanDomainError(f"logarithmic mean needs a, b > 0, got {a!r}, {b!r}")
    if a == b:
        raise MeanDomainError("logarithmic mean needs a != b")
    return (b - a) / math.log1p((b - a) / a)


def power_mean(a: float, b: float, p: float) -> float:
    """``((a^p + b^p)/2)^(1/p)``, straight from the definition for any p != 0."""
    a, b = _sorted_pair(a, b)
    if p == 0:
        raise MeanDomainError("power mean order must be nonzero")
    if a < 0 or (p < 0 and a == 0):
        raise MeanDomainError(f"power mean of order {p!r} undefined at {a!r}, {b!r}")
    return (0.5 * (a ** p + b ** p)) ** (1.0 / p)


def _divided_power(a: float, b: float, m: float) -> float:
    """``(b^m - a^m) / (m (b - a))`` for a < b, summed term by term for integer m >= 1."""
    if float(m).is_integer() and m >= 1:
        k = int(m)
        return math.fsum(a ** i * b ** (k - 1 - i) for i in range(k)) / k
    return (b ** m - a ** m) / (m * (b - a))


def generalized_log(a: float, b: float, n: float) -> float:
    """``L_n(a, b) = [(b^(n+1) - a^(n+1)) / ((n+1)(b-a))]^(1/n)``."""
    a, b = _sorted_pair(a, b)
    if a <= 0 and n < 0:
        raise MeanDomainError(f"generalized logarithmic mean of order {n!r} needs a, b > 0")
    if a < 0:
        raise MeanDomainError(f"generalized logarithmic mean needs a, b >= 0, got {a!r}, {b!r}")
    if a == b:
        raise MeanDomainError("generalized logarithmic mean needs a != b")
    if n in (0, -1):
        raise MeanDomainError("generalized logarithmic mean order must not be 0 or -1")
    return _divided_power(a, b, n + 1) ** (1.0 / n)


def mean(kind: MeanKind, a: float, b: float) -> float:
    if kind.kind == "arithmetic":
        return arithmetic(a, b)
    if kind.kind == "harmonic":
        return harmonic(a, b)
    if kind.kind == "logarithmic":
        return logarithmic(a, b)
    if kind.kind == "power":
        return power_mean(a, b, kind.order)
    return generalized_log(a, b, kind.order)


# ---------------------------------------------------------------------------
# Propositions
# ---------------------------------------------------------------------------

def _proposition_id(which: str) -> str:
    table = {"3.1": "p31", "3.2": "p32", "3.3": "p33", "2.3": "p33"}
    which = table.get(which, which)
    if which not in PROPOSITIONS:
        raise UsageError(f"unknown proposition {which!r}; expected one of {', '.join(PROPOSITIONS)}")
    return which


def _linear_kernel(cfg: Defaults) -> HKernel:
    return HKernel.from_text("t", 1.0, cfg.eval_epsilon)


def check_proposition(which: str, a: float, b: float, p: Optional[float] = None, n: Optional[int] = None,
                      tol: float = DEFAULTS.claim_tol, cfg: Defaults = DEFAULTS,
                      check_hypotheses: bool = False) -> BoundChainReport:
    """One point of a mean inequality, with a quadrature oracle for its left side.

    * p31: ``|1/L - 1/H|`` against the stated power-mean bound and the
      Hölder bound for F = -ln x.
    * p32: ``|1/L - 1/H|`` against ``(b^2 - a^2)/(8ab)`` and the h(t) = t,
      s = 1 closed form for F = -ln x.
    * p33: ``|n A(a^(n-1), b^(n-1)) - L_n^n|`` as stated and
      ``n |A(a^(n-1), b^(n-1)) - L_(n-1)^(n-1)|`` as obtained from F = x^n;
      bounds are the stated power-mean form and the Hölder bound.

    The closed-form left side that matches F is compared with
    ``trapezoid_lhs`` for F; disagreement beyond ``tol`` plus the quadrature
    error makes the report Inconclusive.
    """
    which = _proposition_id(which)
    if not (0 < a < b and math.isfinite(b)):
        raise UsageError(f"propositions need 0 < a < b, got a={a!r}, b={b!r}")
    if which in ("p31", "p33"):
        if p is None or not (p > 1 and math.isfinite(p)):
            raise UsageError(f"{which} needs a finite p > 1, got {p!r}")
    if which == "p33":
        if n is None or int(n) != n or n < 2:
            raise UsageError(f"p33 needs an integer n >= 2, got {n!r}")
        n = int(n)

    interval = IntervalSpec(a, b)
    inputs = {"which": which, "a": a, "b": b, "p": p, "n": n}
    w = b - a
    notes: list[str] = []
    details: dict = {}

    if which in ("p31", "p32"):
        F = parse("-ln(x)")
        lhs = abs(1.0 / logarithmic(a, b) - 1.0 / harmonic(a, b))
        matched = lhs
    else:
        F = parse(f"x^{n}")
        lhs = abs(n * arithmetic(a ** (n - 1), b ** (n - 1)) - generalized_log(a, b, n) ** n)
        matched = n * abs(arithmetic(a ** (n - 1), b ** (n - 1)) - _divided_power(a, b, n))
        details["derived_lhs"] = matched
        notes.append("stated left side mixes degrees n-1 and n; the left side obtained from F = x^n is "
                     "n |A(a^(n-1), b^(n-1)) - L_(n-1)^(n-1)|")

    signed, oracle_err = trapezoid_lhs(F, interval, cfg)
    oracle = abs(signed)
    gap = abs(oracle - matched)
    details.update({"oracle_lhs": oracle, "oracle_gap": gap, "F": str(F)})
    if gap > tol + oracle_err:
        reason = f"closed-form left side {matched!r} disagrees with quadrature oracle {oracle!r}"
        return BoundChainReport(which, lhs, (), oracle_err, tol, "le", {}, tuple(notes), reason, inputs, details)

    kernel = _linear_kernel(cfg)
    derived_lhs = matched if which == "p33" else None
    bounds: list[Bound] = []
    hypotheses: dict = {}
    if which == "p31":
        order = 2.0 * p / (1.0 - p)
        stated = w / (2.0 ** ((3.0 * p - 2.0) / p) * (p + 1.0) ** (1.0 / p)) * power_mean(a, b, order) ** 2
        bounds.append(make_bound("stated-rhs", stated, STATED, lhs, tol, oracle_err))
        theorem = verify_holder_bound(F, kernel, interval, p, tol, cfg, check_hypotheses)
    elif which == "p32":
        stated = (b * b - a * a) / (8.0 * a * b)
        bounds.append(make_bound("stated-rhs", stated, STATED, lhs, tol, oracle_err))
        theorem = verify_linear_kernel_bound(F, interval, tol, cfg, check_hypotheses)
    else:
        q = p / (p - 1.0)
        stated = (w / (2.0 * (p + 1.0) ** (1.0 / p)) * (n * n - n) ** ((p - 1.0) / p)
                 * arithmetic(a ** ((n - 2) * q), b ** ((n - 2) * q)) ** (1.0 / q))
        bounds.append(make_bound("stated-rhs", stated, STATED, lhs, tol, oracle_err))
        bounds.append(make_bound("stated-rhs-vs-derived-lhs", stated, STATED, lhs, tol, oracle_err,
                                 own_lhs=derived_lhs))
        theorem = verify_holder_bound(F, kernel, interval, p, tol, cfg, check_hypotheses)

    label = "linear-kernel-closed-form" if which == "p32" else "holder-bound"
    if theorem.reason:
        bounds.append(Bound("theorem-rhs", None, PROOF, None, INCONCLUSIVE, derived_lhs, theorem.reason))
    else:
        value = theorem.bound(label).value
        bounds.append(make_bound("theorem-rhs", value, PROOF, lhs, tol, oracle_err + theorem.quadrature_error,
                                 own_lhs=derived_lhs, note=f"substitution of F = {F} into the {label}"))
        hypotheses.update(theorem.hypotheses)
    return BoundChainReport(which, lhs, tuple(bounds), oracle_err, tol, "le", hypotheses, tuple(notes), "",
                            inputs, details)


def parse_grid(text: str) -> list[float]:
    """``lo:hi:count`` to ``count`` evenly spaced points (both ends included)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like lo:hi:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:count, got {text!r}") from None
    if count < 1 or (count > 1 and not lo <= hi):
        raise UsageError(f"grid needs count >= 1 and lo <= hi, got {text!r}")
    if count == 1:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def proposition_grid(which: str, a_values: Sequence[float], gaps: Sequence[float],
                     p_values: Iterable[Optional[float]] = (None,), n_values: Iterable[Optional[int]] = (None,),
                     tol: float = DEFAULTS.claim_tol, cfg: Defaults = DEFAULTS) -> list[BoundChainReport]:
    """Reports for every (a, a + gap, p, n) combination, in input order."""
    which = _proposition_id(which)
    p_values = list(p_values) if which != "p32" else [None]
    n_values = list(n_values) if which == "p33" else [None]
    return [check_proposition(which, a, a + d, p, n, tol, cfg)
            for a, d, p, n in itertools.product(a_values, gaps, p_values, n_values)]

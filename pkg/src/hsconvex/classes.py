"""Sampled membership tests for the convexity classes and the inclusion conditions.

Every check evaluates an inequality ``lhs <= rhs`` on a finite sample and
reports the largest observed ``lhs - rhs``.  Nothing here is a proof; a
Satisfied verdict means no sampled point exceeded the tolerance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .config import DEFAULTS
from .errors import EvalError, KernelDomainError, PreconditionError, UsageError
from .expr import FunctionExpr
from .kernels import HKernel

CLASS_IDS = ("convex", "s-convex-2", "h-convex", "hs1", "hs2")
CONDITIONS = ("obs1", "obs2", "obs3")
# base class whose inclusion in the second-sense (h-s) class each condition guarantees
BASE_CLASS = {"obs1": "convex", "obs2": "s-convex-2", "obs3": "h-convex"}

# fraction of t-points allowed to fail kernel evaluation before giving up
_KERNEL_FAILURE_LIMIT = 0.01


class VerdictKind(str, enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Witness:
    t: float
    lhs: float
    rhs: float
    x: Optional[float] = None
    y: Optional[float] = None

    @property
    def violation(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class Verdict:
    claim: str
    kind: VerdictKind
    max_violation: Optional[float]
    samples_checked: int
    tolerance: float
    witness: Optional[Witness] = None
    reason: str = ""
    details: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.kind is VerdictKind.SATISFIED

    @property
    def violated(self) -> bool:
        return self.kind is VerdictKind.VIOLATED

    @property
    def inconclusive(self) -> bool:
        return self.kind is VerdictKind.INCONCLUSIVE


def inconclusive(claim: str, reason: str, tol: float, samples: int = 0, **details) -> Verdict:
    return Verdict(claim, VerdictKind.INCONCLUSIVE, None, samples, tol, None, reason, dict(details))


@dataclass(frozen=True)
class SampleGrid:
    """Evenly spaced x- and t-points plus seeded random (x, y, t) triples."""

    x_points: tuple[float, ...]
    t_points: tuple[float, ...]
    seed: int
    count_random: int
    lo: float
    hi: float
    t_lo: float = 0.0
    t_hi: float = 1.0

    def __post_init__(self):
        if self.lo < 0:
            raise UsageError(f"sample window must lie in [0, inf), got lo={self.lo!r}")
        if not self.lo <= self.hi:
            raise UsageError(f"sample window needs lo <= hi, got [{self.lo!r}, {self.hi!r}]")
        if not (0.0 <= self.t_lo <= self.t_hi <= 1.0):
            raise UsageError(f"t-range must lie in [0, 1], got [{self.t_lo!r}, {self.t_hi!r}]")

    @classmethod
    def build(cls, lo: float, hi: float, n_x: int = DEFAULTS.grid_x, n_t: int = DEFAULTS.grid_t,
              count_random: int = DEFAULTS.grid_random, seed: int = DEFAULTS.seed,
              t_lo: float = 0.0, t_hi: float = 1.0) -> "SampleGrid":
        return cls(_linspace(lo, hi, n_x), _linspace(t_lo, t_hi, n_t), seed, count_random,
                   float(lo), float(hi), float(t_lo), float(t_hi))

    def random_triples(self) -> list[tuple[float, float, float]]:
        if self.count_random == 0:
            return []
        rng = np.random.default_rng(self.seed)
        xs = rng.uniform(self.lo, self.hi, self.count_random)
        ys = rng.uniform(self.lo, self.hi, self.count_random)
        ts = rng.uniform(self.t_lo, self.t_hi, self.count_random)
        return [(float(x), float(y), float(t)) for x, y, t in zip(xs, ys, ts)]

    def triples(self) -> list[tuple[float, float, float]]:
        grid = [(x, y, t) for x in self.x_points for y in self.x_points for t in self.t_points]
        return grid + self.random_triples()

    def all_x(self) -> list[float]:
        values = set(self.x_points)
        for x, y, _ in self.random_triples():
            values.add(x)
            values.add(y)
        return sorted(values)

    def describe(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n_x": len(self.x_points), "n_t": len(self.t_points),
                "t_lo": self.t_lo, "t_hi": self.t_hi, "count_random": self.count_random, "seed": self.seed}


def _linspace(lo: float, hi: float, n: int) -> tuple[float, ...]:
    if n < 1:
        raise UsageError(f"grid needs at least one point, got {n}")
    if n == 1:
        return (float(lo),)
    return tuple(float(v) for v in np.linspace(lo, hi, n))


def default_t_grid(kernel: HKernel, n: int = DEFAULTS.grid_t) -> list[float]:
    """Evenly spaced t over [0, 1], endpoints pulled in where the kernel is singular."""
    lo, hi = kernel.t_range()
    return list(_linspace(lo, hi, n))


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

def class_weights(class_id: str, kernel: Optional[HKernel], s: Optional[float] = None
                  ) -> Callable[[float], tuple[float, float]]:
    """Return ``t -> (weight on f(x), weight on f(y))`` for a class."""
    if class_id not in CLASS_IDS:
        raise UsageError(f"unknown class {class_id!r}; expected one of {', '.join(CLASS_IDS)}")
    if class_id == "convex":
        return lambda t: (t, 1.0 - t)
    if class_id == "s-convex-2":
        if s is None:
            if kernel is None:
                raise UsageError("class s-convex-2 needs an exponent s")
            s = kernel.s
        if not 0 < s <= 1:
            raise UsageError(f"s must lie in (0, 1], got {s!r}")
        return lambda t: (t ** s, (1.0 - t) ** s)
    if kernel is None:
        raise UsageError(f"class {class_id} needs a kernel (h, s)")
    if class_id == "h-convex":
        return lambda t: (kernel.h_eval(t), kernel.h_eval(1.0 - t))
    if class_id == "hs1":
        def first_sense(t):
            w = kernel.hs(t)
            return w, 1.0 - w
        return first_sense
    return lambda t: (kernel.hs(t), kernel.hs(1.0 - t))


def _guarded_weights(weights, t_values: Iterable[float], eps: float):
    """Map each t to (t_used, w1, w2), moving failing endpoint t to the guard.

    Returns the table and the list of t that could not be evaluated at all.
    """
    table: dict[float, tuple[float, float, float]] = {}
    failed: list[float] = []
    for t in t_values:
        if t in table:
            continue
        candidates = [t]
        if t < eps:
            candidates.append(eps)
        elif t > 1.0 - eps:
            candidates.append(1.0 - eps)
        for tc in candidates:
            try:
                w1, w2 = weights(tc)
            except (KernelDomainError, EvalError):
                continue
            table[t] = (tc, w1, w2)
            break
        else:
            failed.append(t)
    return table, failed


def membership_pair(f: FunctionExpr, weights, x: float, y: float, t: float) -> tuple[float, float]:
    """``(f(tx + (1-t)y), w1(t) f(x) + w2(t) f(y))`` for one sample."""
    w1, w2 = weights(t)
    return f(t * x + (1.0 - t) * y), w1 * f(x) + w2 * f(y)


def check_nonnegative(f: FunctionExpr, xs: Iterable[float]) -> None:
    for x in xs:
        v = f(x)
        if v < 0:
            raise PreconditionError(PreconditionError.NEGATIVE_FUNCTION,
                                    f"f({x!r}) = {v!r} < 0 on the sampled domain", x)


def check_membership(f: FunctionExpr, kernel: Optional[HKernel], class_id: str, grid: SampleGrid,
                     tol: float = DEFAULTS.claim_tol, s: Optional[float] = None) -> Verdict:
    """Sampled test of ``f`` against one class's defining inequality.

    Raises :class:`PreconditionError` when f is negative at a sampled point
    (every class except plain convexity requires f >= 0).  Kernel failures at
    more than 1% of the distinct t values, or evaluation failures of f, give
    an Inconclusive verdict.
    """
    claim = f"membership:{class_id}"
    weights = class_weights(class_id, kernel, s)
    xs = grid.all_x()
    try:
        fx = {x: f(x) for x in xs}
    except EvalError as exc:
        return inconclusive(claim, f"f could not be evaluated on the window: {exc}", tol)
    if class_id != "convex":
        check_nonnegative(f, xs)

    triples = grid.triples()
    eps = kernel.eval_epsilon if kernel is not None else DEFAULTS.eval_epsilon
    table, failed = _guarded_weights(weights, sorted({t for _, _, t in triples}), eps)
    n_t = len(table) + len(failed)
    if failed and len(failed) > _KERNEL_FAILURE_LIMIT * n_t:
        return inconclusive(claim, f"kernel undefined at {len(failed)} of {n_t} t-values "
                            f"(first: t={failed[0]!r})", tol)

    worst = -math.inf
    worst_key = None
    witness = None
    checked = 0
    skipped = 0
    for x, y, t in triples:
        entry = table.get(t)
        if entry is None:
            skipped += 1
            continue
        tu, w1, w2 = entry
        try:
            lhs = f(tu * x + (1.0 - tu) * y)
        except EvalError as exc:
            return inconclusive(claim, f"f undefined at an interior point: {exc}", tol, checked)
        rhs = w1 * fx[x] + w2 * fx[y]
        v = lhs - rhs
        checked += 1
        if v > worst or (v == worst and (x, y, tu) < worst_key):
            worst, worst_key = v, (x, y, tu)
            witness = Witness(tu, lhs, rhs, x, y)
    if checked == 0:
        return inconclusive(claim, "no sample could be evaluated", tol)
    details = {"class": class_id, "grid": grid.describe(), "skipped_samples": skipped}
    if kernel is not None:
        details["kernel"] = kernel.describe()
    if worst > tol:
        return Verdict(claim, VerdictKind.VIOLATED, worst, checked, tol, witness, "", details)
    return Verdict(claim, VerdictKind.SATISFIED, worst, checked, tol, None, "", details)


def replay_membership(f: FunctionExpr, kernel: Optional[HKernel], class_id: str, witness: Witness,
                      s: Optional[float] = None) -> tuple[float, float]:
    """Recompute (lhs, rhs) at a membership witness."""
    weights = class_weights(class_id, kernel, s)
    return membership_pair(f, weights, witness.x, witness.y, witness.t)


# ---------------------------------------------------------------------------
# Inclusion conditions
# ---------------------------------------------------------------------------

def condition_pair(kernel: HKernel, which: str, t: float) -> tuple[float, float]:
    """(lhs, rhs) of the pointwise condition ``lhs <= rhs`` at t.

    obs3 additionally needs h(t) > 0; where that fails the pair is
    ``(inf, h(t))`` so the point counts as an unbounded violation.
    """
    if which == "obs1":
        return t, kernel.hs(t)
    if which == "obs2":
        return t, kernel.h_eval(t)
    if which == "obs3":
        h = kernel.h_eval(t)
        if h <= 0:
            return math.inf, h
        return 1.0, math.pow(h, kernel.s - 1.0)
    raise UsageError(f"unknown condition {which!r}; expected one of {', '.join(CONDITIONS)}")


def _pointwise(claim: str, pair: Callable[[float], tuple[float, float]], t_grid: Iterable[float],
               tol: float, absolute: bool = False) -> Verdict:
    worst = -math.inf
    witness = None
    checked = 0
    for t in t_grid:
        try:
            lhs, rhs = pair(t)
        except KernelDomainError as exc:
            return inconclusive(claim, str(exc), tol, checked, offending_t=t)
        v = abs(lhs - rhs) if absolute else lhs - rhs
        checked += 1
        if v > worst:
            worst, witness = v, Witness(t, lhs, rhs)
    if checked == 0:
        return inconclusive(claim, "empty t-grid", tol)
    if worst > tol:
        return Verdict(claim, VerdictKind.VIOLATED, worst, checked, tol, witness)
    return Verdict(claim, VerdictKind.SATISFIED, worst, checked, tol)


def check_inclusion_condition(kernel: HKernel, which: str, t_grid: Optional[Iterable[float]] = None,
                              tol: float = DEFAULTS.claim_tol) -> Verdict:
    if which not in CONDITIONS:
        raise UsageError(f"unknown condition {which!r}; expected one of {', '.join(CONDITIONS)}")
    grid = default_t_grid(kernel) if t_grid is None else list(t_grid)
    verdict = _pointwise(f"condition:{which}", lambda t: condition_pair(kernel, which, t), grid, tol)
    return _with_details(verdict, kernel=kernel.describe())


def _with_details(verdict: Verdict, **extra) -> Verdict:
    return Verdict(verdict.claim, verdict.kind, verdict.max_violation, verdict.samples_checked,
                   verdict.tolerance, verdict.witness, verdict.reason, {**verdict.details, **extra})


def _guard_t_points(kernel: HKernel, t_points: Iterable[float]) -> list[float]:
    eps = kernel.eval_epsilon
    out = []
    for t in t_points:
        if not kernel.evaluable_at(t):
            if t < eps:
                t = eps
            elif t > 1.0 - eps:
                t = 1.0 - eps
        out.append(t)
    return out


def cross_check_inclusion(f: FunctionExpr, kernel: HKernel, which: str, grid: SampleGrid,
                          tol: float = DEFAULTS.claim_tol) -> Verdict:
    """Test one inclusion observation on a concrete f.

    If f passes the base class and the kernel passes the condition, f must
    also pass second-sense (h-s) membership.  The returned verdict is the
    (h-s) membership verdict with ``details['implication']`` set to
    ``holds``, ``refuted`` (premises satisfied, conclusion violated) or
    ``vacuous`` (a premise failed).
    """
    base_class = BASE_CLASS.get(which)
    if base_class is None:
        raise UsageError(f"unknown condition {which!r}; expected one of {', '.join(CONDITIONS)}")
    base = check_membership(f, kernel, base_class, grid, tol)
    cond = check_inclusion_condition(kernel, which, _guard_t_points(kernel, grid.t_points), tol)
    conclusion = check_membership(f, kernel, "hs2", grid, tol)
    summary = {"base_class": base_class, "base_verdict": base.kind.value,
               "condition": which, "condition_verdict": cond.kind.value}
    if base.inconclusive or cond.inconclusive:
        reason = base.reason if base.inconclusive else cond.reason
        return inconclusive(f"inclusion:{which}", f"prerequisite inconclusive: {reason}", tol, **summary)
    if base.satisfied and cond.satisfied:
        implication = "holds" if conclusion.satisfied else (
            "refuted" if conclusion.violated else "inconclusive")
    else:
        implication = "vacuous"
    summary["implication"] = implication
    return Verdict(f"inclusion:{which}", conclusion.kind, conclusion.max_violation,
                   conclusion.samples_checked, tol, conclusion.witness, conclusion.reason,
                   {**conclusion.details, **summary})

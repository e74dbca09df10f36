"""Composition closure: kernel conditions, hypothesis checks, and membership of f∘g."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .classes import (SampleGrid, Verdict, _pointwise, _with_details, check_membership,
                      default_t_grid, inconclusive)
from .config import DEFAULTS
from .errors import EvalError, HypothesisNotMet, KernelDomainError, UsageError
from .expr import FunctionExpr, compose
from .kernels import HKernel

VARIANTS = ("thm26-leq", "thm27-eq")
INNER_KINDS = ("linear", "convex", "unrestricted")


@dataclass(frozen=True)
class TheoremHypotheses:
    class_id: str
    inner_kind: str = "unrestricted"
    outer_member: bool = True
    outer_increasing: bool = False
    inner_member: bool = False
    condition: Optional[str] = None
    note: str = ""


# Hypotheses each closure theorem actually uses, keyed by its CLI identifier.
THEOREMS = {
    "2.1": TheoremHypotheses("hs1", inner_kind="linear",
                             note="g is not required to be increasing; only linearity is used"),
    "2.2": TheoremHypotheses("hs1", inner_kind="convex", outer_increasing=True,
                             note="the statement asks for f convex, but the argument uses convexity "
                                  "of g; g convex is what is checked here"),
    "2.3": TheoremHypotheses("hs2", inner_kind="linear"),
    "2.4": TheoremHypotheses("hs2", inner_kind="convex", outer_increasing=True),
    "2.6": TheoremHypotheses("hs2", inner_member=True, condition="thm26-leq"),
    "2.7": TheoremHypotheses("hs1", inner_member=True, condition="thm27-eq"),
}


@dataclass(frozen=True)
class CompositionSpec:
    outer: FunctionExpr
    inner: FunctionExpr
    power: int = 1
    inner_kind: str = "unrestricted"

    def __post_init__(self):
        if self.power < 1:
            raise UsageError(f"power must be >= 1, got {self.power}")
        if self.inner_kind not in INNER_KINDS:
            raise UsageError(f"inner_kind must be one of {', '.join(INNER_KINDS)}")

    def composed(self) -> FunctionExpr:
        step = compose(self.outer, self.inner)
        result = step
        for _ in range(self.power - 1):
            result = compose(step, result)
        return result


def compose_condition_pair(kernel: HKernel, t: float) -> tuple[float, float]:
    """``(h^s(h^s(t)), h^s(t))``."""
    inner = kernel.hs(t)
    try:
        outer = kernel.hs(inner)
    except KernelDomainError as exc:
        raise KernelDomainError(t, f"h^s(t) = {inner!r} lies outside the domain of h ({exc})") from None
    return outer, inner


def check_compose_condition(kernel: HKernel, variant: str, t_grid: Optional[Iterable[float]] = None,
                            tol: float = DEFAULTS.claim_tol) -> Verdict:
    """``h^s(h^s(t)) <= h^s(t)`` (thm26-leq) or equality (thm27-eq) on a t-grid.

    The default grid covers [0, 1], starting at the guard epsilon instead of
    0 for kernels undefined there.
    """
    if variant not in VARIANTS:
        raise UsageError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    grid = default_t_grid(kernel) if t_grid is None else list(t_grid)
    verdict = _pointwise(f"compose-condition:{variant}", lambda t: compose_condition_pair(kernel, t),
                         grid, tol, absolute=(variant == "thm27-eq"))
    return _with_details(verdict, kernel=kernel.describe())


def _linearity_violation(g: FunctionExpr, grid: SampleGrid, tol: float) -> Optional[str]:
    for x in grid.x_points:
        for y in grid.x_points:
            for t in grid.t_points:
                lhs = g(t * x + (1.0 - t) * y)
                rhs = t * g(x) + (1.0 - t) * g(y)
                if abs(lhs - rhs) > tol * max(1.0, abs(rhs)):
                    return f"g at t={t!r}, x={x!r}, y={y!r}: {lhs!r} != {rhs!r}"
    return None


def _increasing_violation(f: FunctionExpr, xs: list[float]) -> Optional[str]:
    values = [f(x) for x in xs]
    for (x0, v0), (x1, v1) in zip(zip(xs, values), zip(xs[1:], values[1:])):
        if v1 < v0:
            return f"f({x1!r}) = {v1!r} < f({x0!r}) = {v0!r}"
    return None


def compose_and_check(spec: CompositionSpec, kernel: HKernel, class_id: Optional[str], grid: SampleGrid,
                      tol: float = DEFAULTS.claim_tol, theorem: Optional[str] = None) -> Verdict:
    """Check a closure theorem's hypotheses, then test membership of the composition.

    With ``theorem`` set, its hypotheses (see :data:`THEOREMS`) are verified
    by sampling and :class:`HypothesisNotMet` lists every one that fails.
    The outer function is checked on a window covering both the sample
    window and the sampled range of g.
    """
    hyp = None
    if theorem is not None:
        hyp = THEOREMS.get(theorem)
        if hyp is None:
            raise UsageError(f"unknown theorem {theorem!r}; expected one of {', '.join(THEOREMS)}")
        if class_id is None:
            class_id = hyp.class_id
        elif class_id != hyp.class_id:
            raise UsageError(f"theorem {theorem} concerns class {hyp.class_id}, not {class_id}")
    if class_id not in ("hs1", "hs2"):
        raise UsageError(f"composition class must be hs1 or hs2, got {class_id!r}")

    f, g = spec.outer, spec.inner
    claim = f"compose:{class_id}" + (f":{theorem}" if theorem else "")
    inner_kind = spec.inner_kind
    if hyp is not None and hyp.inner_kind != "unrestricted":
        inner_kind = hyp.inner_kind

    failed: list[str] = []
    verified: list[str] = []
    try:
        g_values = [g(x) for x in grid.all_x()]
    except EvalError as exc:
        return inconclusive(claim, f"g could not be evaluated on the window: {exc}", tol)
    if min(g_values) < 0:
        failed.append("g maps [0, inf) into [0, inf)")
    else:
        verified.append("g maps [0, inf) into [0, inf)")

    if inner_kind == "linear":
        problem = _linearity_violation(g, grid, tol)
        (failed if problem else verified).append("g linear" + (f" ({problem})" if problem else ""))
    elif inner_kind == "convex":
        gv = check_membership(g, None, "convex", grid, tol)
        if gv.inconclusive:
            return inconclusive(claim, f"convexity of g inconclusive: {gv.reason}", tol)
        (verified if gv.satisfied else failed).append("g convex")

    range_lo = min(grid.lo, min(g_values))
    range_hi = max(grid.hi, max(g_values))
    outer_grid = SampleGrid.build(range_lo, range_hi, len(grid.x_points), len(grid.t_points),
                                  grid.count_random, grid.seed, grid.t_lo, grid.t_hi)
    if hyp is not None:
        try:
            if hyp.outer_increasing:
                problem = _increasing_violation(f, outer_grid.all_x())
                (failed if problem else verified).append(
                    "f increasing" + (f" ({problem})" if problem else ""))
        except EvalError as exc:
            return inconclusive(claim, f"f could not be evaluated on the range of g: {exc}", tol)
        members = [("f", f, outer_grid)] if hyp.outer_member else []
        if hyp.inner_member:
            members.append(("g", g, grid))
        for name, fn, fn_grid in members:
            mv = check_membership(fn, kernel, class_id, fn_grid, tol)
            if mv.inconclusive:
                return inconclusive(claim, f"membership of {name} inconclusive: {mv.reason}", tol)
            (verified if mv.satisfied else failed).append(f"{name} in {class_id}")
        if hyp.condition is not None:
            cv = check_compose_condition(kernel, hyp.condition, tol=tol)
            if cv.inconclusive:
                return inconclusive(claim, f"kernel condition inconclusive: {cv.reason}", tol)
            (verified if cv.satisfied else failed).append(f"kernel condition {hyp.condition}")
    if failed:
        raise HypothesisNotMet(failed, f"theorem {theorem}" if theorem else "")

    composed = spec.composed()
    verdict = check_membership(composed, kernel, class_id, grid, tol)
    details = {"composed": str(composed), "theorem": theorem, "hypotheses_verified": verified,
               "inner_kind": inner_kind}
    if hyp is not None and hyp.note:
        details["note"] = hyp.note
    return Verdict(claim, verdict.kind, verdict.max_violation, verdict.samples_checked, tol,
                   verdict.witness, verdict.reason, {**verdict.details, **details})


def self_composition_powers(f: FunctionExpr, kernel: HKernel, class_id: str, max_power: int,
                            grid: SampleGrid, tol: float = DEFAULTS.claim_tol) -> list[Verdict]:
    """Verdicts for f, f∘f, ... up to ``max_power`` (capped at 5).

    Power k >= 2 needs the (k-1)-fold iterate to map the sampled window into
    itself; the first power where that fails, and every higher one, is
    Inconclusive.
    """
    if max_power < 1:
        raise UsageError(f"max_power must be >= 1, got {max_power}")
    max_power = min(max_power, DEFAULTS.max_power)
    xs = grid.all_x()
    verdicts: list[Verdict] = []
    current = f
    escaped: Optional[str] = None
    for k in range(1, max_power + 1):
        claim = f"self-composition:{class_id}:power={k}"
        if k > 1 and escaped is None:
            try:
                images = [current(x) for x in xs]
            except EvalError as exc:
                escaped = f"iterate of power {k - 1} undefined on the window: {exc}"
            else:
                lo, hi = min(images), max(images)
                if lo < grid.lo or hi > grid.hi:
                    escaped = (f"range [{lo!r}, {hi!r}] of power {k - 1} escapes the window "
                               f"[{grid.lo!r}, {grid.hi!r}]")
                else:
                    current = compose(f, current)
        if escaped is not None:
            verdicts.append(inconclusive(claim, escaped, tol, power=k))
            continue
        v = check_membership(current, kernel, class_id, grid, tol)
        verdicts.append(Verdict(claim, v.kind, v.max_violation, v.samples_checked, tol, v.witness,
                                v.reason, {**v.details, "power": k, "iterate": str(current)}))
    return verdicts

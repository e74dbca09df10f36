"""Integral identities and Hermite-Hadamard-type upper bounds as LHS/RHS/slack reports.

Each public ``verify_*`` function returns a :class:`BoundChainReport`: one
left-hand side and an ordered list of bounds, each tagged with whether its
formula is the published closed form (``paper-stated``) or is rebuilt
from the intermediate steps of the derivation (``proof-derived``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .classes import SampleGrid, check_membership
from .config import DEFAULTS, Defaults
from .errors import EvalError, KernelDomainError, PreconditionError, QuadratureDivergence, UsageError
from .expr import FunctionExpr, abs_of, pow_of
from .kernels import HKernel, k_constant
from .quadrature import integrate, integrate_kink_aware

STATED = "paper-stated"
PROOF = "proof-derived"

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
_NUMERIC_ERRORS = (EvalError, KernelDomainError, QuadratureDivergence)


@dataclass(frozen=True)
class IntervalSpec:
    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a < self.b) or not math.isfinite(self.b):
            raise UsageError(f"interval needs 0 <= a < b, got a={self.a!r}, b={self.b!r}")

    @property
    def width(self) -> float:
        return self.b - self.a

    def point(self, t: float) -> float:
        """``t*a + (1-t)*b``."""
        return t * self.a + (1.0 - t) * self.b


@dataclass(frozen=True)
class Bound:
    label: str
    value: Optional[float]
    provenance: str
    slack: Optional[float]
    verdict: str
    lhs: Optional[float] = None  # set when this bound is compared against its own left side
    note: str = ""


@dataclass(frozen=True)
class BoundChainReport:
    claim_id: str
    lhs: Optional[float]
    bounds: tuple[Bound, ...]
    quadrature_error: float
    tolerance: float
    relation: str = "le"
    hypotheses: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    reason: str = ""
    inputs: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def slacks(self) -> list[Optional[float]]:
        return [b.slack for b in self.bounds]

    @property
    def verdict(self) -> str:
        if self.reason or self.lhs is None:
            return INCONCLUSIVE
        verdicts = [b.verdict for b in self.bounds]
        if FAILS in verdicts:
            return FAILS
        if INCONCLUSIVE in verdicts:
            return INCONCLUSIVE
        return HOLDS

    def bound(self, label: str) -> Bound:
        for b in self.bounds:
            if b.label == label:
                return b
        raise KeyError(label)


def make_bound(label: str, value: Optional[float], provenance: str, lhs: Optional[float], tol: float,
               qerr: float, relation: str = "le", own_lhs: Optional[float] = None, note: str = "") -> Bound:
    """Slack is ``value - lhs``; the bound holds iff slack >= -(tol + qerr)
    (or ``|slack| <= tol + qerr`` for an equality)."""
    ref = own_lhs if own_lhs is not None else lhs
    if value is None or ref is None or not math.isfinite(value):
        return Bound(label, value, provenance, None, INCONCLUSIVE, own_lhs, note)
    slack = value - ref
    allowance = tol + qerr
    ok = abs(slack) <= allowance if relation == "eq" else slack >= -allowance
    return Bound(label, value, provenance, slack, HOLDS if ok else FAILS, own_lhs, note)


def _inconclusive(claim_id: str, reason: str, tol: float, inputs: dict, relation: str = "le",
                  hypotheses: Optional[dict] = None) -> BoundChainReport:
    return BoundChainReport(claim_id, None, (), 0.0, tol, relation, hypotheses or {}, (), reason, inputs)


def _inputs(F: FunctionExpr, interval: IntervalSpec, kernel: Optional[HKernel] = None, **extra) -> dict:
    out = {"F": str(F), "a": interval.a, "b": interval.b}
    if kernel is not None:
        out["h"] = str(kernel.h)
        out["s"] = kernel.s
    out.update(extra)
    return out


def _quad(f, a, b, cfg: Defaults, kinks=()):
    if kinks:
        return integrate_kink_aware(f, a, b, kinks, cfg.quad_tol, cfg.quad_budget, cfg.quad_rtol)
    return integrate(f, a, b, cfg.quad_tol, cfg.quad_budget, cfg.quad_rtol)


def _hypothesis(fn: FunctionExpr, kernel: HKernel, interval: IntervalSpec, cfg: Defaults) -> str:
    """Sampled second-sense (h-s) membership of ``fn`` on [a, b]."""
    grid = SampleGrid.build(interval.a, interval.b, cfg.grid_x, cfg.grid_t, cfg.grid_random, cfg.seed)
    try:
        return check_membership(fn, kernel, "hs2", grid, cfg.claim_tol).kind.value
    except PreconditionError:
        return "violated"


# ---------------------------------------------------------------------------
# Left-hand sides
# ---------------------------------------------------------------------------

def trapezoid_lhs(F: FunctionExpr, interval: IntervalSpec, cfg: Defaults = DEFAULTS) -> tuple[float, float]:
    """Signed ``(F'(a) + F'(b))/2 - mean of F' over [a, b]`` and its quadrature error."""
    d1 = F.derivative()
    a, b = interval.a, interval.b
    q = _quad(d1, a, b, cfg)
    return 0.5 * (d1(a) + d1(b)) - q.value / interval.width, q.error / interval.width


def mean_value(F: FunctionExpr, interval: IntervalSpec, cfg: Defaults = DEFAULTS) -> tuple[float, float]:
    q = _quad(F, interval.a, interval.b, cfg)
    return q.value / interval.width, q.error / interval.width


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------

LEMMAS = ("lemma213", "lemma214")


def verify_identity(F: FunctionExpr, interval: IntervalSpec, which: str,
                    tol: float = DEFAULTS.claim_tol, cfg: Defaults = DEFAULTS) -> BoundChainReport:
    """Both sides of an integration-by-parts identity, each by quadrature.

    lemma213: (F'(a)+F'(b))/2 - mean(F') = (b-a)/2 * int_0^1 (1-2t) F''(ta+(1-t)b) dt
    lemma214: (F(a)+F(b))/2 - mean(F)    = (b-a)^2/2 * int_0^1 (t-t^2) F''(ta+(1-t)b) dt
    """
    if which not in LEMMAS:
        raise UsageError(f"unknown identity {which!r}; expected one of {', '.join(LEMMAS)}")
    inputs = _inputs(F, interval, which=which)
    try:
        d1 = F.derivative()
        d2 = d1.derivative()
        a, b, w = interval.a, interval.b, interval.width
        if which == "lemma213":
            lhs, lhs_err = trapezoid_lhs(F, interval, cfg)
            q = _quad(lambda t: (1.0 - 2.0 * t) * d2(interval.point(t)), 0.0, 1.0, cfg)
            rhs = 0.5 * w * q.value
            rhs_err = 0.5 * w * q.error
        else:
            mean, lhs_err = mean_value(F, interval, cfg)
            lhs = 0.5 * (F(a) + F(b)) - mean
            q = _quad(lambda t: (t - t * t) * d2(interval.point(t)), 0.0, 1.0, cfg)
            rhs = 0.5 * w * w * q.value
            rhs_err = 0.5 * w * w * q.error
    except _NUMERIC_ERRORS as exc:
        return _inconclusive(which, str(exc), tol, inputs, "eq")
    qerr = lhs_err + rhs_err
    bound = make_bound("rhs", rhs, STATED, lhs, tol, qerr, "eq")
    return BoundChainReport(which, lhs, (bound,), qerr, tol, "eq", inputs=inputs,
                            details={"residual": lhs - rhs})


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def _nonnegative_on(F: FunctionExpr, interval: IntervalSpec, n: int) -> None:
    for i in range(n):
        x = interval.a + interval.width * i / (n - 1)
        v = F(x)
        if v < 0:
            raise PreconditionError(PreconditionError.NEGATIVE_FUNCTION,
                                    f"F({x!r}) = {v!r} < 0 on [a, b]", x)


def verify_hh_upper(F: FunctionExpr, kernel: HKernel, interval: IntervalSpec,
                    tol: float = DEFAULTS.claim_tol, cfg: Defaults = DEFAULTS,
                    check_hypotheses: bool = True) -> BoundChainReport:
    """Mean of F over [a, b] against K * (F(a) + F(b)).

    Also emits ``(F(a)+F(b)) * int_0^1 h`` when s = 1 and the closed form
    ``(F(a)+F(b))/(s+1)`` when h(t) = t.  Raises :class:`PreconditionError`
    if F is negative at a sampled point of [a, b].
    """
    claim = "thm2.9"
    inputs = _inputs(F, interval, kernel)
    try:
        _nonnegative_on(F, interval, cfg.grid_x)
    except EvalError as exc:
        return _inconclusive(claim, str(exc), tol, inputs)
    hypotheses = {}
    notes = ["only second-sense membership of F is sampled; the first-sense composition route "
             "concludes first-sense membership and is not treated as establishing this bound"]
    if check_hypotheses:
        hypotheses["F in hs2 on [a,b] (sampled)"] = _hypothesis(F, kernel, interval, cfg)
    try:
        K = k_constant(kernel, cfg.quad_tol, cfg.quad_budget)
        lhs, lhs_err = mean_value(F, interval, cfg)
        ends = F(interval.a) + F(interval.b)
        qerr = lhs_err + K.error * abs(ends)
        bounds = [make_bound("K-bound", K.value * ends, STATED, lhs, tol, qerr)]
        if kernel.s == 1.0:
            qh = _quad(kernel.h_eval, 0.0, 1.0, cfg)
            bounds.append(make_bound("s1-integral-of-h", ends * qh.value, STATED, lhs, tol,
                                     lhs_err + qh.error * abs(ends)))
        if kernel.is_identity:
            bounds.append(make_bound("linear-kernel-closed-form", ends / (kernel.s + 1.0), STATED, lhs, tol,
                                     lhs_err))
    except _NUMERIC_ERRORS as exc:
        return _inconclusive(claim, str(exc), tol, inputs, hypotheses=hypotheses)
    if K.note:
        notes.append(K.note)
    return BoundChainReport(claim, lhs, tuple(bounds), qerr, tol, "le", hypotheses, tuple(notes),
                            inputs=inputs, details={"K": K.value})


def kernel_moments(kernel: HKernel, cfg: Defaults = DEFAULTS) -> dict:
    """K, int |1-2t| h^s(t) dt and int t h^s(t) dt with their error estimates."""
    K = k_constant(kernel, cfg.quad_tol, cfg.quad_budget)
    mid = _quad(lambda t: abs(1.0 - 2.0 * t) * kernel.hs(t), 0.0, 1.0, cfg, kinks=(0.5,))
    first = _quad(lambda t: t * kernel.hs(t), 0.0, 1.0, cfg)
    return {"K": K, "abs_weighted": mid, "first_moment": first}


def verify_trapezoid_bounds(F: FunctionExpr, kernel: HKernel, interval: IntervalSpec,
                            tol: float = DEFAULTS.claim_tol, cfg: Defaults = DEFAULTS,
                            check_hypotheses: bool = True) -> BoundChainReport:
    """``|(F'(a)+F'(b))/2 - mean(F')|`` against the chain of bounds for |F''| in (h-s)_2.

    With A = |F''(a)|, B = |F''(b)|, M = int |1-2t| h^s, T = int t h^s:

    * middle (proof-derived): (b-a)/2 (A+B) M
    * final-symmetric (as stated): (b-a)/2 (A+B) (K + 2T)
    * final-asymmetric (proof-derived): (b-a)/2 [A (K + 2T) + B (3K - 2T)]
    * for h(t) = t, s = 1: (b-a)(A+B)/8, plus the same with first derivatives
      as it appears in print.
    """
    claim = "thm2.15"
    inputs = _inputs(F, interval, kernel)
    hypotheses = {}
    try:
        d1 = F.derivative()
        d2 = d1.derivative()
        if check_hypotheses:
            hypotheses["|F''| in hs2 on [a,b] (sampled)"] = _hypothesis(abs_of(d2), kernel, interval, cfg)
        signed, lhs_err = trapezoid_lhs(F, interval, cfg)
        lhs = abs(signed)
        m = kernel_moments(kernel, cfg)
        K, M, T = m["K"].value, m["abs_weighted"].value, m["first_moment"].value
        A, B = abs(d2(interval.a)), abs(d2(interval.b))
        w = interval.width
        scale = 0.5 * w * (A + B)
        qerr = lhs_err + scale * (m["K"].error + m["abs_weighted"].error + 2.0 * m["first_moment"].error)
        bounds = [
            make_bound("middle", scale * M, PROOF, lhs, tol, qerr),
            make_bound("final-symmetric", scale * (K + 2.0 * T), STATED, lhs, tol, qerr),
            make_bound("final-asymmetric", 0.5 * w * (A * (K + 2.0 * T) + B * (3.0 * K - 2.0 * T)), PROOF,
                       lhs, tol, qerr),
        ]
        if kernel.is_identity and kernel.s == 1.0:
            bounds.append(make_bound("linear-kernel-closed-form", w * (A + B) / 8.0, STATED, lhs, tol, lhs_err))
            printed = w * (abs(d1(interval.a)) + abs(d1(interval.b))) / 8.0
            bounds.append(make_bound("linear-kernel-as-printed", printed, STATED, lhs, tol, lhs_err,
                                     note="first derivatives, as the closed form appears in print"))
    except _NUMERIC_ERRORS as exc:
        return _inconclusive(claim, str(exc), tol, inputs, hypotheses=hypotheses)
    notes = ("all bounds use |F''(a)| and |F''(b)|",)
    if m["K"].note:
        notes += (m["K"].note,)
    return BoundChainReport(claim, lhs, tuple(bounds), qerr, tol, "le", hypotheses, notes, inputs=inputs,
                            details={"K": K, "abs_weighted_moment": M, "first_moment": T,
                                     "signed_lhs": signed})


def verify_linear_kernel_bound(F: FunctionExpr, interval: IntervalSpec, tol: float = DEFAULTS.claim_tol,
                               cfg: Defaults = DEFAULTS, check_hypotheses: bool = True) -> BoundChainReport:
    """The h(t) = t, s = 1 specialisation: middle bound plus both closed forms."""
    kernel = HKernel.from_text("t", 1.0, cfg.eval_epsilon)
    full = verify_trapezoid_bounds(F, kernel, interval, tol, cfg, check_hypotheses)
    keep = ("middle", "linear-kernel-closed-form", "linear-kernel-as-printed")
    bounds = tuple(b for b in full.bounds if b.label in keep)
    return BoundChainReport("cor2.16", full.lhs, bounds, full.quadrature_error, tol, "le", full.hypotheses,
                            full.notes, full.reason, full.inputs, full.details)


def verify_holder_bound(F: FunctionExpr, kernel: HKernel, interval: IntervalSpec, p: float,
                        tol: float = DEFAULTS.claim_tol, cfg: Defaults = DEFAULTS,
                        check_hypotheses: bool = True) -> BoundChainReport:
    """``|(F'(a)+F'(b))/2 - mean(F')|`` against the Hölder-step bound.

    With q = p/(p-1):
    ``(b-a) / (2 (p+1)^(1/p)) * [K (|F''(a)|^q + |F''(b)|^q)]^(1/q)``.
    The factor 1/(p+1) is also computed as int_0^1 |1-2t|^p dt by
    quadrature; the quadrature version is emitted as a second bound and the
    two must agree to 1e-9.  The intermediate bound after the Hölder step
    alone (before the convexity of |F''|^q is used) is emitted as well.
    """
    if not (p > 1 and math.isfinite(p)):
        raise UsageError(f"p must be a finite number > 1, got {p!r}")
    q = p / (p - 1.0)
    claim = "thm2.17"
    inputs = _inputs(F, interval, kernel, p=p)
    hypotheses = {}
    notes = []
    try:
        d1 = F.derivative()
        d2 = d1.derivative()
        if check_hypotheses:
            hypotheses["|F''|^q in hs2 on [a,b] (sampled)"] = _hypothesis(
                pow_of(abs_of(d2), q), kernel, interval, cfg)
        signed, lhs_err = trapezoid_lhs(F, interval, cfg)
        lhs = abs(signed)
        K = k_constant(kernel, cfg.quad_tol, cfg.quad_budget)
        moment = _quad(lambda t: abs(1.0 - 2.0 * t) ** p, 0.0, 1.0, cfg, kinks=(0.5,))
        closed = 1.0 / (p + 1.0)
        if abs(moment.value - closed) > 1e-9:
            notes.append(f"int |1-2t|^p = {moment.value!r} differs from 1/(p+1) = {closed!r}")
        A, B = abs(d2(interval.a)), abs(d2(interval.b))
        w = interval.width
        convex_part = (K.value * (A ** q + B ** q)) ** (1.0 / q)
        stated = w / (2.0 * (p + 1.0) ** (1.0 / p)) * convex_part
        quad_version = 0.5 * w * moment.value ** (1.0 / p) * convex_part
        power_mean = _quad(lambda t: abs(d2(interval.point(t))) ** q, 0.0, 1.0, cfg)
        holder_step = 0.5 * w * moment.value ** (1.0 / p) * power_mean.value ** (1.0 / q)
        qerr = lhs_err + stated * (K.error / max(K.value, 1e-300) + moment.error * (p + 1.0)) + \
            0.5 * w * power_mean.error
        bounds = [
            make_bound("holder-step", holder_step, PROOF, lhs, tol, qerr),
            make_bound("holder-bound", stated, STATED, lhs, tol, qerr),
            make_bound("holder-bound-quadrature", quad_version, PROOF, lhs, tol, qerr),
        ]
    except _NUMERIC_ERRORS as exc:
        return _inconclusive(claim, str(exc), tol, inputs, hypotheses=hypotheses)
    if K.note:
        notes.append(K.note)
    return BoundChainReport(claim, lhs, tuple(bounds), qerr, tol, "le", hypotheses, tuple(notes),
                            inputs=inputs, details={"K": K.value, "q": q, "abs_power_moment": moment.value,
                                                    "signed_lhs": signed})

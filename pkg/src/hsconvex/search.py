"""Seeded counterexample search over function and kernel families.

Trial ``i`` draws its parameters from a generator seeded by ``(seed, i)``,
so raising the budget only appends trials and never changes earlier ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classes import CLASS_IDS, CONDITIONS, SampleGrid, check_inclusion_condition, check_membership, default_t_grid
from .compose import VARIANTS, check_compose_condition
from .config import DEFAULTS, Defaults
from .errors import EvalError, HSConvexError, KernelDomainError, KernelError, PreconditionError, UsageError
from .expr import FunctionExpr, parse
from .hh import (FAILS, INCONCLUSIVE, IntervalSpec, verify_hh_upper, verify_holder_bound, verify_identity,
                 verify_linear_kernel_bound, verify_trapezoid_bounds)
from .kernels import HKernel
from .means import check_proposition

CLAIMS = ("membership", "inclusion", "compose-condition", "identity", "bound", "proposition")
FAMILIES = ("poly", "exp-affine", "neg-log")
THEOREMS = ("2.9", "2.15", "2.16", "2.17")

# Slack histogram bin edges; bin i counts slacks in [EDGES[i], EDGES[i+1]).
BIN_EDGES = (-math.inf, -1.0, -1e-3, -1e-6, -1e-9, 1e-9, 1e-6, 1e-3, 1.0, math.inf)

_DEFAULT_RANGES = {
    "coef": (-2.0, 2.0),
    "scale": (0.1, 2.0),
    "rate": (-2.0, 2.0),
    "c": (0.1, 2.0),
    "k": (1.0, 1.0),
    "s": (1.0, 1.0),
    "a": (0.1, 2.0),
    "gap": (0.1, 2.0),
    "p": (1.5, 4.0),
    "n": (2, 5),
}
_INTEGER_PARAMS = ("n", "degree")


@dataclass(frozen=True)
class ClaimSpec:
    claim_id: str
    fixed: dict = field(default_factory=dict)
    space: dict = field(default_factory=dict)
    budget: int = DEFAULTS.search_budget
    seed: int = DEFAULTS.seed

    def __post_init__(self):
        if self.claim_id not in CLAIMS:
            raise UsageError(f"unknown claim {self.claim_id!r}; expected one of {', '.join(CLAIMS)}")
        if not isinstance(self.budget, int) or self.budget < 1:
            raise UsageError(f"budget must be an integer >= 1, got {self.budget!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise UsageError(f"seed must be a nonnegative integer, got {self.seed!r}")
        for name, rng in self.space.items():
            if len(rng) != 2 or not rng[0] <= rng[1] or not all(math.isfinite(v) for v in rng):
                raise UsageError(f"range for {name!r} must be finite (lo, hi) with lo <= hi, got {rng!r}")
        lo = lambda name: self.space.get(name, _DEFAULT_RANGES.get(name, (0, 0)))[0]
        hi = lambda name: self.space.get(name, _DEFAULT_RANGES.get(name, (0, 0)))[1]
        if "s" not in self.fixed and not (0 < lo("s") and hi("s") <= 1):
            raise UsageError("range for s must lie in (0, 1]")
        if "a" not in self.fixed and lo("a") < 0:
            raise UsageError("range for a must lie in [0, inf)")
        if "gap" not in self.fixed and lo("gap") <= 0:
            raise UsageError("range for gap must lie in (0, inf) so that a < b")
        if "p" not in self.fixed and lo("p") <= 1:
            raise UsageError("range for p must lie in (1, inf)")
        if "n" not in self.fixed and lo("n") < 2:
            raise UsageError("range for n must start at 2 or more")


@dataclass(frozen=True)
class TrialOutcome:
    status: str  # "ok", "violated" or "inconclusive"
    slack: Optional[float]
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    label: str = ""
    reason: str = ""


@dataclass(frozen=True)
class SearchReport:
    claim_id: str
    trials: int
    violations: int
    inconclusive: int
    worst_witness: Optional[dict]
    min_slack: Optional[float]
    slack_histogram: tuple[int, ...]
    seed: int
    violating_trials: tuple[int, ...] = ()
    tolerance: float = DEFAULTS.claim_tol
    fixed: dict = field(default_factory=dict)
    space: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.violations:
            return FAILS
        if self.inconclusive:
            return INCONCLUSIVE
        return "holds"


# ---------------------------------------------------------------------------
# Parameter drawing and families
# ---------------------------------------------------------------------------

def _needed(spec_fixed: dict, claim_id: str) -> list[str]:
    fixed = spec_fixed
    names: list[str] = []

    def kernel_params():
        names.extend(["c", "k", "s"])

    def family_params():
        family = fixed.get("family", "poly")
        if family == "poly":
            names.extend(f"c{i}" for i in range(int(fixed.get("degree", 3)) + 1))
        elif family == "exp-affine":
            names.extend(["scale", "rate"])
        else:
            names.append("scale")

    if claim_id == "membership":
        family_params()
        if fixed.get("class", "hs2") != "convex":
            kernel_params()
    elif claim_id in ("inclusion", "compose-condition"):
        kernel_params()
    elif claim_id == "identity":
        family_params()
        names.extend(["a", "gap"])
    elif claim_id == "bound":
        family_params()
        theorem = str(fixed.get("theorem", "2.9"))
        if theorem != "2.16":
            kernel_params()
        names.extend(["a", "gap"])
        if theorem == "2.17":
            names.append("p")
    else:
        which = fixed.get("which", "p32")
        names.extend(["a", "gap"])
        if which in ("p31", "p33"):
            names.append("p")
        if which == "p33":
            names.append("n")
    return names


def _range(spec: ClaimSpec, name: str):
    if name in spec.space:
        return spec.space[name]
    if name.startswith("c") and name[1:].isdigit():
        return spec.space.get("coef", _DEFAULT_RANGES["coef"])
    return _DEFAULT_RANGES[name]


def draw_binding(spec: ClaimSpec, index: int) -> dict:
    """Fixed parameters plus the values drawn for trial ``index``."""
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, index]))
    binding = dict(spec.fixed)
    for name in sorted(_needed(spec.fixed, spec.claim_id)):
        lo, hi = _range(spec, name)
        if name in _INTEGER_PARAMS:
            value = int(rng.integers(int(lo), int(hi) + 1))
        else:
            value = float(rng.uniform(lo, hi)) if lo < hi else float(lo)
        if name not in binding:
            binding[name] = value
    return binding


def _poly_text(coefs: list[float]) -> str:
    return " + ".join(f"({c!r})*x^{k}" if k else f"({c!r})" for k, c in enumerate(coefs))


def _poly_min(coefs: list[float], lo: float, hi: float) -> float:
    poly = np.polynomial.Polynomial(coefs)
    points = [lo, hi]
    for r in poly.deriv().roots():
        if abs(r.imag) < 1e-12 and lo < r.real < hi:
            points.append(float(r.real))
    return min(float(poly(x)) for x in points)


def family_function(binding: dict, lo: float, hi: float) -> FunctionExpr:
    """Build the family member for ``binding``, nonnegative on [lo, hi]."""
    family = binding.get("family", "poly")
    if family == "poly":
        degree = int(binding.get("degree", 3))
        coefs = [float(binding[f"c{i}"]) for i in range(degree + 1)]
        m = _poly_min(coefs, lo, hi)
        coefs[0] = coefs[0] - m + binding.get("margin", 1e-9)
        return parse(_poly_text(coefs))
    scale = float(binding["scale"])
    if scale < 0:
        raise UsageError(f"family scale must be >= 0, got {scale!r}")
    if family == "exp-affine":
        return parse(f"({scale!r})*exp(({float(binding['rate'])!r})*x)")
    if family == "neg-log":
        if lo <= 0:
            raise UsageError("the neg-log family needs a window inside (0, inf)")
        return parse(f"({scale!r})*({math.log(hi)!r} - ln(x))")
    raise UsageError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def family_kernel(binding: dict, eps: float = DEFAULTS.eval_epsilon) -> HKernel:
    if "h" in binding:
        return HKernel.from_text(str(binding["h"]), float(binding["s"]), eps)
    c, k = float(binding["c"]), float(binding["k"])
    text = f"({c!r})*t" if k == 1 else f"({c!r})*t^({k!r})"
    return HKernel.from_text(text, float(binding["s"]), eps)


# ---------------------------------------------------------------------------
# Claim evaluation
# ---------------------------------------------------------------------------

def _from_verdict(v, tol: float) -> TrialOutcome:
    if v.inconclusive:
        return TrialOutcome("inconclusive", None, reason=v.reason)
    slack = 0.0 - v.max_violation
    w = v.witness
    status = "violated" if v.violated else "ok"
    return TrialOutcome(status, slack, w.lhs if w else None, w.rhs if w else None)


def _from_report(report, label: Optional[str]) -> TrialOutcome:
    if report.reason or report.lhs is None:
        return TrialOutcome("inconclusive", None, reason=report.reason or "no left side")
    bounds = [b for b in report.bounds if label is None or b.label == label]
    if not bounds:
        raise UsageError(f"report has no bound labelled {label!r}")
    if any(b.verdict == INCONCLUSIVE for b in bounds):
        return TrialOutcome("inconclusive", None, reason="a bound could not be evaluated")
    if report.relation == "eq":
        worst = max(bounds, key=lambda b: abs(b.slack))
        slack = -abs(worst.slack)
    else:
        worst = min(bounds, key=lambda b: b.slack)
        slack = worst.slack
    lhs = worst.lhs if worst.lhs is not None else report.lhs
    status = "violated" if any(b.verdict == FAILS for b in bounds) else "ok"
    return TrialOutcome(status, slack, lhs, worst.value, worst.label)


def run_trial(claim_id: str, binding: dict, tol: float = DEFAULTS.claim_tol, cfg: Defaults = DEFAULTS
              ) -> TrialOutcome:
    """Evaluate one claim at a full parameter binding.

    For ``bound`` claims, ``require_hypotheses`` in the binding turns trials
    whose sampled hypotheses fail into Inconclusive ones.
    """
    try:
        return _run_trial(claim_id, binding, tol, cfg)
    except (PreconditionError, EvalError, KernelDomainError, KernelError) as exc:
        return TrialOutcome("inconclusive", None, reason=str(exc))
    except UsageError:
        raise
    except HSConvexError as exc:
        return TrialOutcome("inconclusive", None, reason=str(exc))


def _run_trial(claim_id: str, b: dict, tol: float, cfg: Defaults) -> TrialOutcome:
    eps = cfg.eval_epsilon
    if claim_id == "membership":
        class_id = b.get("class", "hs2")
        if class_id not in CLASS_IDS:
            raise UsageError(f"unknown class {class_id!r}")
        lo, hi = float(b.get("lo", cfg.domain_lo)), float(b.get("hi", cfg.domain_hi))
        f = family_function(b, lo, hi)
        kernel = None if class_id == "convex" else family_kernel(b, eps)
        grid = SampleGrid.build(lo, hi, cfg.search_grid_x, cfg.search_grid_t, cfg.search_grid_random, cfg.seed)
        return _from_verdict(check_membership(f, kernel, class_id, grid, tol), tol)
    if claim_id == "inclusion":
        which = b.get("which", "obs1")
        if which not in CONDITIONS:
            raise UsageError(f"unknown condition {which!r}")
        kernel = family_kernel(b, eps)
        return _from_verdict(check_inclusion_condition(kernel, which, default_t_grid(kernel, cfg.grid_t), tol), tol)
    if claim_id == "compose-condition":
        variant = b.get("variant", "thm26-leq")
        if variant not in VARIANTS:
            raise UsageError(f"unknown variant {variant!r}")
        kernel = family_kernel(b, eps)
        return _from_verdict(check_compose_condition(kernel, variant, default_t_grid(kernel, cfg.grid_t), tol), tol)

    a = float(b["a"])
    upper = a + float(b["gap"])
    if claim_id == "proposition":
        report = check_proposition(b.get("which", "p32"), a, upper, b.get("p"), b.get("n"), tol, cfg)
        return _from_report(report, b.get("label"))
    interval = IntervalSpec(a, upper)
    F = family_function(b, a, upper)
    if claim_id == "identity":
        return _from_report(verify_identity(F, interval, b.get("lemma", "lemma213"), tol, cfg), None)
    theorem = str(b.get("theorem", "2.9"))
    if theorem not in THEOREMS:
        raise UsageError(f"unknown theorem {theorem!r}; expected one of {', '.join(THEOREMS)}")
    hyp = bool(b.get("require_hypotheses", False))
    if theorem == "2.16":
        report = verify_linear_kernel_bound(F, interval, tol, cfg, check_hypotheses=hyp)
    else:
        kernel = family_kernel(b, eps)
        if theorem == "2.9":
            report = verify_hh_upper(F, kernel, interval, tol, cfg, check_hypotheses=hyp)
        elif theorem == "2.15":
            report = verify_trapezoid_bounds(F, kernel, interval, tol, cfg, check_hypotheses=hyp)
        else:
            report = verify_holder_bound(F, kernel, interval, float(b["p"]), tol, cfg, check_hypotheses=hyp)
    unmet = [name for name, state in report.hypotheses.items() if state != "satisfied"]
    if hyp and unmet:
        return TrialOutcome("inconclusive", None, reason=f"hypothesis not met: {', '.join(unmet)}")
    return _from_report(report, b.get("label"))


def _bin(slack: float) -> int:
    for i in range(len(BIN_EDGES) - 1):
        if BIN_EDGES[i] <= slack < BIN_EDGES[i + 1]:
            return i
    return len(BIN_EDGES) - 2


def search_counterexample(spec: ClaimSpec, tol: float = DEFAULTS.claim_tol, cfg: Defaults = DEFAULTS
                          ) -> SearchReport:
    """Run ``spec.budget`` trials and summarise slack and violations.

    The worst witness is the trial with the smallest slack (earliest index
    on ties), reported with its full binding, left and right sides.
    """
    hist = [0] * (len(BIN_EDGES) - 1)
    violating: list[int] = []
    n_inconclusive = 0
    worst: Optional[tuple[float, int, dict, TrialOutcome]] = None
    for i in range(spec.budget):
        binding = draw_binding(spec, i)
        out = run_trial(spec.claim_id, binding, tol, cfg)
        if out.status == "inconclusive":
            n_inconclusive += 1
            continue
        hist[_bin(out.slack)] += 1
        if out.status == "violated":
            violating.append(i)
        if worst is None or out.slack < worst[0]:
            worst = (out.slack, i, binding, out)
    witness = None
    min_slack = None
    if worst is not None:
        min_slack = worst[0]
        slack, i, binding, out = worst
        witness = {"trial": i, "binding": binding, "lhs": out.lhs, "rhs": out.rhs, "slack": slack,
                   "label": out.label, "violated": out.status == "violated"}
    return SearchReport(spec.claim_id, spec.budget, len(violating), n_inconclusive, witness, min_slack,
                        tuple(hist), spec.seed, tuple(violating), tol, dict(spec.fixed),
                        {k: tuple(v) for k, v in spec.space.items()})


def replay_witness(report: SearchReport, tol: Optional[float] = None, cfg: Defaults = DEFAULTS) -> TrialOutcome:
    """Re-run the claim at the report's worst witness."""
    if report.worst_witness is None:
        raise UsageError("report has no witness to replay")
    return run_trial(report.claim_id, report.worst_witness["binding"],
                     report.tolerance if tol is None else tol, cfg)

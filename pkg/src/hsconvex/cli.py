"""Command-line front end.

Exit codes: 0 when every verdict holds, 1 when any is violated, 2 when any
is inconclusive (and none violated), 64 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import __version__
from .classes import CLASS_IDS, CONDITIONS, SampleGrid, check_inclusion_condition, check_membership, \
    cross_check_inclusion, replay_membership
from .compose import THEOREMS as COMPOSE_THEOREMS
from .compose import VARIANTS, CompositionSpec, check_compose_condition, compose_and_check, self_composition_powers
from .config import DEFAULTS, Defaults
from .errors import (EvalError, ExprSyntaxError, HSConvexError, HypothesisNotMet, KernelDomainError, KernelError,
                     MeanDomainError, MultipleVariablesError, PreconditionError, QuadratureDivergence, UsageError)
from .expr import parse
from .hh import (IntervalSpec, verify_hh_upper, verify_holder_bound, verify_identity, verify_linear_kernel_bound,
                 verify_trapezoid_bounds)
from .kernels import HKernel, k_constant
from .means import KINDS, ALIASES, MeanKind, check_proposition, mean, parse_grid, proposition_grid
from .quadrature import integrate, integrate_kink_aware
from .report import FORMATS, overall, render
from .search import CLAIMS, ClaimSpec, search_counterexample

EXIT_OK, EXIT_VIOLATED, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
LEMMAS = {"2.13": "lemma213", "2.14": "lemma214", "lemma213": "lemma213", "lemma214": "lemma214"}
BOUND_THEOREMS = ("2.9", "2.15", "2.16", "2.17")
_STRING_KEYS = ("which", "lemma", "theorem", "family", "class", "variant", "h", "label")


class _UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageExit(f"{self.prog}: error: {message}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--tol", type=float, default=None, help="claim tolerance")
    p.add_argument("--quad-tol", type=float, default=None, help="absolute quadrature tolerance")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    return p


def _kernel_args(p, required=True):
    p.add_argument("--h", required=required, help="kernel h as an expression in t")
    p.add_argument("--s", type=float, required=required)


def _grid_args(p):
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=None)
    p.add_argument("--grid-x", type=int, default=None)
    p.add_argument("--grid-t", type=int, default=None)
    p.add_argument("--grid-random", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hsconvex", description="Sampled and quadrature checks for (h-s)-convexity claims.")
    parser.add_argument("--version", action="version", version=f"hsconvex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = [_common()]

    p = sub.add_parser("parse", parents=common, help="parse, print and differentiate an expression")
    p.add_argument("--expr", required=True)
    p.add_argument("--var", default=None)
    p.add_argument("--at", type=float, action="append", default=[], help="evaluate at this point (repeatable)")

    p = sub.add_parser("integrate", parents=common, help="adaptive quadrature")
    p.add_argument("--f", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--kinks", default="", help="comma-separated split points")
    p.add_argument("--budget", type=int, default=None)

    p = sub.add_parser("kconst", parents=common, help="K = integral of h^s over [0, 1]")
    _kernel_args(p)

    p = sub.add_parser("membership", parents=common, help="sampled class membership")
    p.add_argument("--f", required=True)
    p.add_argument("--class", dest="class_id", choices=CLASS_IDS, required=True)
    _kernel_args(p, required=False)
    _grid_args(p)

    p = sub.add_parser("inclusion", parents=common, help="inclusion conditions on h and s")
    p.add_argument("--which", choices=CONDITIONS, required=True)
    _kernel_args(p)
    p.add_argument("--f", default=None, help="also test the implication on this function")
    _grid_args(p)

    p = sub.add_parser("compose-check", parents=common, help="composition closure")
    p.add_argument("--f", default=None)
    p.add_argument("--g", default=None)
    p.add_argument("--theorem", choices=sorted(COMPOSE_THEOREMS), default=None)
    p.add_argument("--class", dest="class_id", choices=("hs1", "hs2"), default=None)
    p.add_argument("--inner-kind", choices=("linear", "convex", "unrestricted"), default="unrestricted")
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--self-powers", type=int, default=None, help="check f, f∘f, ... up to this power")
    p.add_argument("--condition", choices=VARIANTS, default=None, help="check only the kernel condition")
    _kernel_args(p)
    _grid_args(p)

    p = sub.add_parser("identity", parents=common, help="integration-by-parts identities")
    p.add_argument("--lemma", choices=sorted(LEMMAS), required=True)
    p.add_argument("--F", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("bound", parents=common, help="upper bounds of Hermite-Hadamard type")
    p.add_argument("--theorem", choices=BOUND_THEOREMS, required=True)
    p.add_argument("--F", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    _kernel_args(p, required=False)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--no-hypotheses", action="store_true", help="skip the sampled hypothesis checks")

    p = sub.add_parser("means", parents=common, help="special means")
    p.add_argument("--kind", choices=sorted(set(KINDS) | set(ALIASES)), required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--order", type=float, default=None, help="order of the power or generalized-log mean")

    p = sub.add_parser("proposition", parents=common, help="mean inequalities")
    p.add_argument("--which", choices=("3.1", "3.2", "3.3", "p31", "p32", "p33"), required=True)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--p", default=None, help="p > 1, or a comma-separated list in grid mode")
    p.add_argument("--n", default=None, help="integer n >= 2, or a comma-separated list in grid mode")
    p.add_argument("--a-grid", default=None, help="lo:hi:count")
    p.add_argument("--gap-grid", default=None, help="lo:hi:count")

    p = sub.add_parser("search", parents=common, help="seeded counterexample search")
    p.add_argument("--claim", choices=CLAIMS, required=True)
    p.add_argument("--budget", type=int, default=None)
    for key in ("which", "lemma", "theorem", "family", "variant", "h"):
        p.add_argument(f"--{key}", default=None)
    p.add_argument("--class", dest="class_id", default=None)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--fix", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--range", action="append", default=[], metavar="KEY=LO:HI")
    return parser


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _kernel(args, cfg: Defaults) -> HKernel:
    if args.h is None or args.s is None:
        raise UsageError("this command needs --h and --s")
    return HKernel.from_text(args.h, args.s, cfg.eval_epsilon)


def _grid(args, cfg: Defaults) -> SampleGrid:
    lo = cfg.domain_lo if args.lo is None else args.lo
    hi = cfg.domain_hi if args.hi is None else args.hi
    return SampleGrid.build(lo, hi, args.grid_x or cfg.grid_x, args.grid_t or cfg.grid_t,
                            cfg.grid_random if args.grid_random is None else args.grid_random, cfg.seed)


def _inconclusive_report(claim: str, reason: str, **extra) -> dict:
    return {"type": "error", "claim": claim, "verdict": "inconclusive", "reason": reason, **extra}


def _floats(text: Optional[str]) -> list:
    if text is None:
        return [None]
    try:
        return [float(v) for v in str(text).split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_parse(args, cfg):
    f = parse(args.expr, args.var)
    out = {"type": "expression", "expression": str(f), "variable": f.variable, "verdict": "ok"}
    d1 = f.derivative()
    out["derivative"] = str(d1)
    out["second_derivative"] = str(d1.derivative())
    if args.at:
        out["values"] = [{"x": x, "value": f(x)} for x in args.at]
    return [out]


def cmd_integrate(args, cfg):
    f = parse(args.f)
    budget = args.budget or cfg.quad_budget
    kinks = [float(k) for k in args.kinks.split(",") if k.strip()] if args.kinks else []
    if kinks:
        return [integrate_kink_aware(f, args.a, args.b, kinks, cfg.quad_tol, budget)]
    return [integrate(f, args.a, args.b, cfg.quad_tol, budget)]


def cmd_kconst(args, cfg):
    kernel = _kernel(args, cfg)
    q = k_constant(kernel, cfg.quad_tol, cfg.quad_budget)
    return [{"type": "kconst", "claim": "K", "value": q.value, "error": q.error, "evaluations": q.evaluations,
             "converged": q.converged, "note": q.note, "kernel": kernel.describe(), "verdict": "ok"}]


def cmd_membership(args, cfg):
    f = parse(args.f)
    kernel = _kernel(args, cfg) if args.h is not None else None
    v = check_membership(f, kernel, args.class_id, _grid(args, cfg), cfg.claim_tol, args.s)
    if v.witness is not None:
        lhs, rhs = replay_membership(f, kernel, args.class_id, v.witness, args.s)
        v.details["replay"] = {"lhs": lhs, "rhs": rhs, "reproduced": lhs == v.witness.lhs and rhs == v.witness.rhs}
    return [v]


def cmd_inclusion(args, cfg):
    kernel = _kernel(args, cfg)
    if args.f is None:
        return [check_inclusion_condition(kernel, args.which, tol=cfg.claim_tol)]
    return [cross_check_inclusion(parse(args.f), kernel, args.which, _grid(args, cfg), cfg.claim_tol)]


def cmd_compose(args, cfg):
    kernel = _kernel(args, cfg)
    if args.condition is not None:
        return [check_compose_condition(kernel, args.condition, tol=cfg.claim_tol)]
    if args.f is None:
        raise UsageError("compose-check needs --f (with --g or --self-powers) or --condition")
    grid = _grid(args, cfg)
    f = parse(args.f)
    if args.self_powers is not None:
        class_id = args.class_id or "hs2"
        return self_composition_powers(f, kernel, class_id, args.self_powers, grid, cfg.claim_tol)
    if args.g is None:
        raise UsageError("compose-check needs --g or --self-powers")
    spec = CompositionSpec(f, parse(args.g), args.power, args.inner_kind)
    return [compose_and_check(spec, kernel, args.class_id, grid, cfg.claim_tol, args.theorem)]


def cmd_identity(args, cfg):
    return [verify_identity(parse(args.F), IntervalSpec(args.a, args.b), LEMMAS[args.lemma], cfg.claim_tol, cfg)]


def cmd_bound(args, cfg):
    F = parse(args.F)
    interval = IntervalSpec(args.a, args.b)
    hyp = not args.no_hypotheses
    if args.theorem == "2.16":
        return [verify_linear_kernel_bound(F, interval, cfg.claim_tol, cfg, hyp)]
    if args.theorem == "2.17" and args.p is None:
        raise UsageError("theorem 2.17 needs --p")
    kernel = _kernel(args, cfg)
    if args.theorem == "2.9":
        return [verify_hh_upper(F, kernel, interval, cfg.claim_tol, cfg, hyp)]
    if args.theorem == "2.15":
        return [verify_trapezoid_bounds(F, kernel, interval, cfg.claim_tol, cfg, hyp)]
    return [verify_holder_bound(F, kernel, interval, args.p, cfg.claim_tol, cfg, hyp)]


def cmd_means(args, cfg):
    kind = MeanKind.parse(args.kind, args.order)
    value = mean(kind, args.a, args.b)
    return [{"type": "mean", "claim": f"mean:{kind.kind}", "kind": kind.kind, "order": kind.order,
             "a": args.a, "b": args.b, "value": value, "verdict": "ok"}]


def cmd_proposition(args, cfg):
    ps = _floats(args.p)
    ns = [None if n is None else int(n) for n in _floats(args.n)]
    if args.a_grid is not None or args.gap_grid is not None:
        if args.a_grid is None or args.gap_grid is None:
            raise UsageError("grid mode needs both --a-grid and --gap-grid")
        return proposition_grid(args.which, parse_grid(args.a_grid), parse_grid(args.gap_grid), ps, ns,
                                cfg.claim_tol, cfg)
    if args.a is None or args.b is None:
        raise UsageError("proposition needs --a and --b, or --a-grid and --gap-grid")
    return [check_proposition(args.which, args.a, args.b, ps[0], ns[0], cfg.claim_tol, cfg)]


def cmd_search(args, cfg):
    fixed = {}
    for item in args.fix:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--fix expects KEY=VALUE, got {item!r}")
        fixed[key] = value if key in _STRING_KEYS else _scalar(value)
    for key in ("which", "theorem", "family", "variant", "h"):
        if getattr(args, key) is not None:
            fixed[key] = getattr(args, key)
    if args.lemma is not None:
        if args.lemma not in LEMMAS:
            raise UsageError(f"unknown lemma {args.lemma!r}")
        fixed["lemma"] = LEMMAS[args.lemma]
    if args.class_id is not None:
        fixed["class"] = args.class_id
    if args.s is not None:
        fixed["s"] = args.s
    space = {}
    for item in args.range:
        key, sep, value = item.partition("=")
        lo, colon, hi = value.partition(":")
        if not sep or not colon:
            raise UsageError(f"--range expects KEY=LO:HI, got {item!r}")
        try:
            space[key] = (float(lo), float(hi))
        except ValueError:
            raise UsageError(f"--range expects numbers, got {item!r}") from None
    spec = ClaimSpec(args.claim, fixed, space, args.budget or cfg.search_budget, cfg.seed)
    return [search_counterexample(spec, cfg.claim_tol, cfg)]


COMMANDS = {
    "parse": cmd_parse, "integrate": cmd_integrate, "kconst": cmd_kconst, "membership": cmd_membership,
    "inclusion": cmd_inclusion, "compose-check": cmd_compose, "identity": cmd_identity, "bound": cmd_bound,
    "means": cmd_means, "proposition": cmd_proposition, "search": cmd_search,
}


def _exit_code(reports: list) -> int:
    state = overall(reports)
    return {"violated": EXIT_VIOLATED, "inconclusive": EXIT_INCONCLUSIVE}.get(state, EXIT_OK)


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageExit as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    try:
        cfg = DEFAULTS.with_overrides(claim_tol=args.tol, quad_tol=args.quad_tol, seed=args.seed)
        if cfg.claim_tol <= 0 or cfg.quad_tol <= 0:
            raise UsageError("tolerances must be positive")
        if cfg.seed < 0:
            raise UsageError("seed must be nonnegative")
        reports = _dispatch(args, cfg)
    except ExprSyntaxError as exc:
        print(f"hsconvex {args.command}: syntax error at byte {exc.offset}: {exc}", file=stderr)
        return EXIT_USAGE
    except (UsageError, MultipleVariablesError, KernelError, MeanDomainError) as exc:
        print(f"hsconvex {args.command}: {exc}", file=stderr)
        return EXIT_USAGE

    header = {"command": args.command, "version": __version__, "config": cfg.as_dict(),
              "args": {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out", "format")}}
    text = render(reports, args.format, header)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"hsconvex {args.command}: cannot write {args.out}: {exc.strerror}", file=stderr)
            return EXIT_USAGE
    else:
        stdout.write(text)
    return _exit_code(reports)


def _dispatch(args, cfg) -> list:
    claim = args.command
    try:
        return COMMANDS[args.command](args, cfg)
    except PreconditionError as exc:
        return [_inconclusive_report(claim, str(exc), precondition=exc.reason, at=exc.x)]
    except HypothesisNotMet as exc:
        return [_inconclusive_report(claim, str(exc), failed_hypotheses=list(exc.failed))]
    except (QuadratureDivergence, KernelDomainError, EvalError) as exc:
        return [_inconclusive_report(claim, str(exc))]
    except (UsageError, ExprSyntaxError, MultipleVariablesError, KernelError, MeanDomainError):
        raise
    except HSConvexError as exc:
        return [_inconclusive_report(claim, str(exc))]


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))

"""Adaptive Gauss-Kronrod (7/15) integration on finite intervals.

Every node lies strictly inside its subinterval, so integrands with an
integrable singularity at an endpoint (``t**-0.5`` at 0, ``1/sqrt(1-t)`` at
1) are handled by plain bisection toward the singular end.  Subintervals are
kept in a heap keyed on their error estimate; the final sum is taken in
left-to-right order with ``math.fsum`` so results are bit-reproducible.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .config import DEFAULTS
from .errors import EvalError, QuadratureDivergence, UsageError

# Kronrod nodes on [-1, 1] (positive half, descending) and their weights.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
# 7-point Gauss weights; the Gauss nodes are _XGK[1], _XGK[3], _XGK[5], _XGK[7].
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

_EPS = 2.220446049250313e-16
# Polynomial degree integrated exactly by the 15-point Kronrod rule.
KRONROD_DEGREE = 22
_STALL_WINDOW = 50


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int
    converged: bool
    note: str = ""

    def __add__(self, other: "QuadResult") -> "QuadResult":
        notes = "; ".join(n for n in (self.note, other.note) if n)
        return QuadResult(self.value + other.value, self.error + other.error,
                          self.evaluations + other.evaluations,
                          self.converged and other.converged, notes)


def _checked(f: Callable[[float], float], x: float) -> float:
    try:
        y = f(x)
    except (OverflowError, ZeroDivisionError) as exc:
        raise EvalError(EvalError.NON_FINITE, f"integrand failed at x={x!r}: {exc}") from None
    if not math.isfinite(y):
        raise EvalError(EvalError.NON_FINITE, f"integrand is {y!r} at x={x!r}")
    return y


def gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod 7/15 panel on [a, b]: (Kronrod value, error estimate).

    The error estimate follows the QUADPACK heuristic: the raw Gauss/Kronrod
    difference is sharpened by ``(200*diff/resasc)**1.5`` and floored by
    round-off in the sum of absolute values.
    """
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = _checked(f, center)
    res_k = fc * _WGK[7]
    res_g = fc * _WG[3]
    res_abs = abs(res_k)
    f1 = [0.0] * 7
    f2 = [0.0] * 7
    for j in range(7):
        dx = half * _XGK[j]
        y1 = _checked(f, center - dx)
        y2 = _checked(f, center + dx)
        f1[j], f2[j] = y1, y2
        res_k += _WGK[j] * (y1 + y2)
        res_abs += _WGK[j] * (abs(y1) + abs(y2))
        if j % 2 == 1:
            res_g += _WG[j // 2] * (y1 + y2)
    mean = 0.5 * res_k
    res_asc = _WGK[7] * abs(fc - mean)
    for j in range(7):
        res_asc += _WGK[j] * (abs(f1[j] - mean) + abs(f2[j] - mean))
    value = res_k * half
    res_abs *= abs(half)
    res_asc *= abs(half)
    err = abs((res_k - res_g) * half)
    if res_asc != 0.0 and err != 0.0:
        err = res_asc * min(1.0, (200.0 * err / res_asc) ** 1.5)
    if res_abs > 1e-300 / (50 * _EPS):
        err = max(50 * _EPS * res_abs, err)
    return value, err


def _open_panel(a: float, b: float) -> bool:
    center = 0.5 * (a + b)
    dx = 0.5 * (b - a) * _XGK[0]
    return a < center - dx and center + dx < b


def _splittable(a: float, b: float) -> bool:
    mid = 0.5 * (a + b)
    return a < mid < b and _open_panel(a, mid) and _open_panel(mid, b)


def integrate(f: Callable[[float], float], a: float, b: float,
              tol: float = DEFAULTS.quad_tol, budget: int = DEFAULTS.quad_budget,
              rtol: float = 0.0) -> QuadResult:
    """Adaptive integral of ``f`` over [a, b].

    Converged means the summed error estimate is at most
    ``max(tol, rtol * |value|)``.  Raises :class:`QuadratureDivergence` when
    the total error stops decreasing (a divergent or non-integrable
    singularity) or the subdivision reaches floating-point resolution without
    meeting the tolerance.  Returns an unconverged result if the evaluation
    budget runs out while the error is still shrinking.  Evaluation errors
    from ``f`` propagate unchanged.
    """
    if not a < b:
        raise UsageError(f"integrate needs a < b, got a={a!r}, b={b!r}")
    if not tol > 0:
        raise UsageError(f"tolerance must be positive, got {tol!r}")
    value, err = gk15(f, a, b)
    evals = 15
    heap = [(-err, a, b, value)]
    done: list[tuple[float, float, float, float]] = []  # unsplittable panels
    total_err = err
    history: list[float] = []

    def target() -> float:
        approx = math.fsum(p[3] for p in heap) + math.fsum(p[3] for p in done)
        return max(tol, rtol * abs(approx))

    while total_err > target():
        if not heap:
            raise QuadratureDivergence(
                f"subdivision reached floating-point resolution with error {total_err:.3g} > tolerance")
        if evals + 30 > budget:
            if len(history) > _STALL_WINDOW and total_err >= 0.99 * history[-1 - _STALL_WINDOW]:
                raise QuadratureDivergence(
                    f"budget of {budget} evaluations exhausted with non-decreasing error {total_err:.3g}")
            return _collect(heap, done, evals, False, "evaluation budget exhausted")
        neg_err, lo, hi, _ = heapq.heappop(heap)
        if not _splittable(lo, hi):
            done.append((neg_err, lo, hi, _))
            continue
        mid = 0.5 * (lo + hi)
        v1, e1 = gk15(f, lo, mid)
        v2, e2 = gk15(f, mid, hi)
        evals += 30
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total_err = math.fsum(-p[0] for p in heap) + math.fsum(-p[0] for p in done)
        history.append(total_err)
        if len(history) > _STALL_WINDOW and total_err >= 0.99 * history[-1 - _STALL_WINDOW]:
            raise QuadratureDivergence(
                f"error estimate stopped decreasing ({total_err:.3g} after {evals} evaluations); "
                "integral appears divergent")
    return _collect(heap, done, evals, True, "")


def _collect(heap, done, evals: int, converged: bool, note: str) -> QuadResult:
    panels = sorted(heap + done, key=lambda p: (p[1], p[2]))
    value = math.fsum(p[3] for p in panels)
    err = math.fsum(-p[0] for p in panels)
    return QuadResult(value, err, evals, converged, note)


def integrate_kink_aware(f: Callable[[float], float], a: float, b: float,
                         kinks: Sequence[float] = (), tol: float = DEFAULTS.quad_tol,
                         budget: int = DEFAULTS.quad_budget, rtol: float = 0.0) -> QuadResult:
    """Integrate piecewise across ``kinks`` (sorted, strictly inside (a, b)).

    Each piece gets an equal share of ``tol`` so the summed error estimate
    still respects it.
    """
    points = [float(a), *map(float, kinks), float(b)]
    for lo, hi in zip(points, points[1:]):
        if not lo < hi:
            raise UsageError(f"kinks must be sorted and strictly inside ({a!r}, {b!r}); got {list(kinks)!r}")
    pieces = len(points) - 1
    result = None
    for lo, hi in zip(points, points[1:]):
        part = integrate(f, lo, hi, tol / pieces, max(budget // pieces, 15), rtol)
        result = part if result is None else result + part
    return result

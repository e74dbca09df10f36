import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsconvex.errors import EvalError, QuadratureDivergence, UsageError
from hsconvex.expr import parse
from hsconvex.quadrature import _WG, _WGK, _XGK, KRONROD_DEGREE, gk15, integrate, integrate_kink_aware


def test_gauss_nodes_match_numpy_legendre():
    nodes, weights = np.polynomial.legendre.leggauss(7)
    ours_nodes = sorted([-_XGK[j] for j in (1, 3, 5)] + [0.0] + [_XGK[j] for j in (5, 3, 1)])
    ours_weights = [_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]]
    assert np.allclose(sorted(nodes), ours_nodes, atol=1e-15)
    assert np.allclose(weights, ours_weights, atol=1e-15)


def test_kronrod_weights_sum_to_one():
    assert math.isclose(2 * sum(_WGK[:7]) + _WGK[7], 2.0, abs_tol=1e-15)


@pytest.mark.parametrize("k", range(KRONROD_DEGREE + 1))
def test_single_panel_exact_on_monomials(k):
    value, _ = gk15(lambda x: x ** k, 0.0, 1.0)
    assert abs(value - 1.0 / (k + 1)) <= 1e-12


def test_examples():
    assert abs(integrate(lambda x: x * x, 0, 1).value - 1 / 3) <= 1e-12
    assert abs(integrate(lambda t: abs(1 - 2 * t) ** 2, 0, 1).value - 1 / 3) <= 1e-10
    r = integrate(lambda t: t ** -0.5, 0, 1)
    assert r.converged and abs(r.value - 2.0) <= 1e-9


def test_kink_aware_examples():
    assert abs(integrate_kink_aware(lambda t: abs(1 - 2 * t), 0, 1, [0.5]).value - 0.5) <= 1e-12
    assert abs(integrate_kink_aware(lambda t: abs(1 - 2 * t) * t, 0, 1, [0.5]).value - 0.25) <= 1e-12
    assert abs(integrate_kink_aware(lambda t: abs(1 - 2 * t) ** 3, 0, 1, [0.5]).value - 0.25) <= 1e-12


@pytest.mark.parametrize("p", [2, 3, 5, 10])
def test_abs_power_moment(p):
    r = integrate_kink_aware(lambda t: abs(1 - 2 * t) ** p, 0, 1, [0.5])
    assert abs(r.value - 1 / (p + 1)) <= 1e-9


def test_converged_error_within_tolerance():
    r = integrate(math.sin, 0, 3, tol=1e-10)
    assert r.converged and r.error <= 1e-10
    assert abs(r.value - (1 - math.cos(3))) <= 1e-12


def test_log_singularity():
    assert abs(integrate(math.log, 0, 1).value + 1) <= 1e-9


def test_divergent_integral_raises():
    with pytest.raises(QuadratureDivergence):
        integrate(lambda t: 1 / t, 0, 1)


def test_budget_exhaustion_reports_unconverged():
    r = integrate(lambda x: math.sin(50 * x), 0, 10, tol=1e-14, budget=45)
    assert not r.converged
    assert r.evaluations <= 45


def test_evaluations_within_budget():
    r = integrate(lambda x: math.sin(40 * x), 0, 5, budget=2000)
    assert r.evaluations <= 2000


@pytest.mark.parametrize("a, b", [(1, 1), (2, 1)])
def test_bad_interval(a, b):
    with pytest.raises(UsageError):
        integrate(math.sin, a, b)


def test_bad_tolerance():
    with pytest.raises(UsageError):
        integrate(math.sin, 0, 1, tol=0)


def test_bad_kinks():
    with pytest.raises(UsageError):
        integrate_kink_aware(math.sin, 0, 1, [0.7, 0.3])
    with pytest.raises(UsageError):
        integrate_kink_aware(math.sin, 0, 1, [1.0])


def test_eval_errors_propagate():
    f = parse("ln(x - 0.5)")
    with pytest.raises(EvalError):
        integrate(f, 0, 1)


def test_non_finite_integrand():
    with pytest.raises(EvalError) as info:
        integrate(lambda x: math.inf, 0, 1)
    assert info.value.kind == EvalError.NON_FINITE


def test_bitwise_reproducible():
    f = lambda x: math.exp(math.sin(7 * x)) / (1 + x * x)
    assert integrate(f, 0, 3) == integrate(f, 0, 3)


def test_open_rule_never_touches_endpoints():
    seen = []

    def f(x):
        seen.append(x)
        return x ** -0.5

    integrate(f, 0.0, 1.0)
    assert 0.0 not in seen and 1.0 not in seen


coefficients = st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=6)


def _smooth(cs):
    return lambda x: sum(c * math.cos((k + 1) * x) + c * x ** k for k, c in enumerate(cs))


@given(coefficients, st.floats(0.05, 0.95))
def test_interval_additivity(cs, frac):
    f = _smooth(cs)
    tol = 1e-10
    c = frac * 2.0
    whole = integrate(f, 0, 2, tol).value
    parts = integrate(f, 0, c, tol).value + integrate(f, c, 2, tol).value
    assert abs(whole - parts) <= 3 * tol


@given(coefficients, coefficients, st.floats(-2, 2), st.floats(-2, 2))
def test_linearity(cf, cg, alpha, beta):
    f, g = _smooth(cf), _smooth(cg)
    tol = 1e-10
    combined = integrate(lambda x: alpha * f(x) + beta * g(x), 0, 1, tol).value
    separate = alpha * integrate(f, 0, 1, tol).value + beta * integrate(g, 0, 1, tol).value
    assert abs(combined - separate) <= 3 * tol


@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=KRONROD_DEGREE + 1))
def test_polynomials_exact(cs):
    exact = sum(c / (k + 1) for k, c in enumerate(cs))
    got = integrate(lambda x: sum(c * x ** k for k, c in enumerate(cs)), 0, 1).value
    assert abs(got - exact) <= 1e-12


@given(st.floats(0.5, 6.0))
def test_abs_power_symmetry(p):
    tol = 1e-10
    full = integrate_kink_aware(lambda t: abs(1 - 2 * t) ** p, 0, 1, [0.5], tol).value
    half = integrate(lambda t: (1 - 2 * t) ** p, 0, 0.5, tol).value
    assert abs(full - 2 * half) <= 2 * tol

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsconvex.errors import KernelDomainError, KernelError, QuadratureDivergence
from hsconvex.kernels import HKernel, hs_eval, k_constant
from hsconvex.quadrature import integrate


def test_hs_eval_examples():
    assert hs_eval(HKernel.from_text("t", 1), 0.3) == 0.3
    assert hs_eval(HKernel.from_text("1/t", 0.5), 0.25) == 2.0
    with pytest.raises(KernelDomainError):
        hs_eval(HKernel.from_text("1/t", 0.5), 0.0)


def test_negative_h_is_a_domain_error():
    k = HKernel.from_text("1 - t", 1)
    with pytest.raises(KernelDomainError) as info:
        k.hs(1.5)
    assert info.value.t == 1.5


@pytest.mark.parametrize("s", [0.0, -0.5, 1.5])
def test_s_outside_unit_interval(s):
    with pytest.raises(KernelError):
        HKernel.from_text("t", s)


def test_identically_zero_kernel_rejected():
    with pytest.raises(KernelError):
        HKernel.from_text("0*t", 1)


def test_kernel_negative_on_interior_rejected():
    with pytest.raises(KernelDomainError):
        HKernel.from_text("t - 0.5", 0.5)


def test_isolated_zero_accepted():
    k = HKernel.from_text("(t-0.5)^2", 1)
    assert k.hs(0.5) == 0.0


@pytest.mark.parametrize("s", [0.25, 0.5, 1.0])
def test_k_for_linear_kernel(s):
    r = k_constant(HKernel.from_text("t", s))
    assert r.converged
    assert abs(r.value - 1 / (s + 1)) <= 1e-10


def test_k_endpoint_singular():
    r = k_constant(HKernel.from_text("1/t", 0.5))
    assert abs(r.value - 2.0) <= 1e-8
    # the reflected integrand is singular at t = 1, where doubles are too coarse
    assert "reflection" in r.note


def test_k_divergent():
    with pytest.raises(QuadratureDivergence):
        k_constant(HKernel.from_text("1/t", 1))


def test_t_range_pulls_in_singular_end():
    assert HKernel.from_text("t", 1).t_range() == (0.0, 1.0)
    assert HKernel.from_text("1/t", 0.5).t_range() == (1e-6, 1.0)


def test_identity_flag():
    assert HKernel.from_text("t", 0.5).is_identity
    assert not HKernel.from_text("2*t", 0.5).is_identity


@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_k_monotone_in_s(s1, s2):
    lo, hi = sorted((s1, s2))
    k_lo = k_constant(HKernel.from_text("t", lo)).value
    k_hi = k_constant(HKernel.from_text("t", hi)).value
    assert k_lo >= k_hi - 2e-10


@given(st.floats(0.1, 3.0), st.floats(0.0, 2.0), st.floats(0.2, 1.0))
def test_reflection_symmetry(c, d, s):
    kernel = HKernel.from_text(f"{c!r}*t^2 + {d!r}*t + 0.1", s)
    tol = 1e-10
    direct = integrate(kernel.hs, 0, 1, tol).value
    reflected = integrate(lambda t: kernel.hs(1 - t), 0, 1, tol).value
    assert abs(direct - reflected) <= 2 * tol
    assert abs(k_constant(kernel, tol).value - direct) <= 2 * tol

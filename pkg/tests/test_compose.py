import pytest

from hsconvex.classes import SampleGrid
from hsconvex.compose import (CompositionSpec, check_compose_condition, compose_and_check, compose_condition_pair,
                              self_composition_powers)
from hsconvex.errors import HypothesisNotMet, UsageError
from hsconvex.expr import parse
from hsconvex.kernels import HKernel

LINEAR = HKernel.from_text("t", 1)
SMALL = SampleGrid.build(0, 4, 17, 17, 200)


def test_condition_identity_kernel_equality():
    v = check_compose_condition(LINEAR, "thm27-eq")
    assert v.satisfied and v.max_violation == 0.0


def test_condition_singular_kernel():
    kernel = HKernel.from_text("1/t", 0.5)
    grid = [1e-6 + (1 - 1e-6) * i / 64 for i in range(65)]
    assert check_compose_condition(kernel, "thm26-leq", grid).satisfied
    assert check_compose_condition(kernel, "thm26-leq").satisfied


def test_condition_violated_with_witness():
    kernel = HKernel.from_text("2*t", 1)
    v = check_compose_condition(kernel, "thm26-leq")
    assert v.violated
    assert compose_condition_pair(kernel, 0.5) == (2.0, 1.0)
    assert compose_condition_pair(kernel, v.witness.t) == (v.witness.lhs, v.witness.rhs)


def test_condition_unknown_variant():
    with pytest.raises(UsageError):
        check_compose_condition(LINEAR, "thm99")


def test_condition_outside_kernel_domain_is_inconclusive():
    # h maps into [3, 3.7], where ln(2 - t) is undefined
    kernel = HKernel.from_text("ln(2 - t) + 3", 1)
    v = check_compose_condition(kernel, "thm26-leq")
    assert v.inconclusive and "offending_t" in v.details


def test_square_of_square_theorem_path():
    spec = CompositionSpec(parse("x^2"), parse("x^2"))
    v = compose_and_check(spec, LINEAR, "hs2", SMALL, theorem="2.6")
    assert v.satisfied
    assert v.details["composed"] == "(x^2)^2"
    assert "kernel condition thm26-leq" in v.details["hypotheses_verified"]


def test_plain_composition_without_theorem():
    v = compose_and_check(CompositionSpec(parse("x^2"), parse("x^2")), LINEAR, "hs2", SMALL)
    assert v.satisfied


def test_linear_inner():
    spec = CompositionSpec(parse("x^2"), parse("2*x"))
    assert compose_and_check(spec, LINEAR, "hs2", SMALL, theorem="2.3").satisfied
    assert compose_and_check(spec, LINEAR, "hs1", SMALL, theorem="2.1").satisfied


def test_identity_composition():
    v = compose_and_check(CompositionSpec(parse("x"), parse("x")), LINEAR, "hs2", SMALL)
    assert v.satisfied and abs(v.max_violation) <= 1e-12


@pytest.mark.parametrize("theorem", ["2.2", "2.4", "2.7"])
def test_other_theorems_on_squares(theorem):
    spec = CompositionSpec(parse("x^2"), parse("x^2"))
    assert compose_and_check(spec, LINEAR, None, SMALL, theorem=theorem).satisfied


def test_nonlinear_inner_fails_linear_hypothesis():
    spec = CompositionSpec(parse("x^2"), parse("x^2"))
    with pytest.raises(HypothesisNotMet) as info:
        compose_and_check(spec, LINEAR, "hs2", SMALL, theorem="2.3")
    assert any(item.startswith("g linear") for item in info.value.failed)


def test_decreasing_outer_fails():
    spec = CompositionSpec(parse("(5-x)^2"), parse("x^2"))
    with pytest.raises(HypothesisNotMet) as info:
        compose_and_check(spec, LINEAR, "hs2", SampleGrid.build(0, 2, 9, 9, 20), theorem="2.4")
    assert any(item.startswith("f increasing") for item in info.value.failed)


def test_kernel_condition_failure_reported():
    spec = CompositionSpec(parse("x^2"), parse("x^2"))
    with pytest.raises(HypothesisNotMet) as info:
        compose_and_check(spec, HKernel.from_text("2*t", 1), "hs2", SMALL, theorem="2.6")
    assert "kernel condition thm26-leq" in info.value.failed


def test_theorem_class_mismatch():
    spec = CompositionSpec(parse("x^2"), parse("x^2"))
    with pytest.raises(UsageError):
        compose_and_check(spec, LINEAR, "hs1", SMALL, theorem="2.6")


def test_power_iterates_composition():
    spec = CompositionSpec(parse("x+1"), parse("2*x"), power=2)
    assert spec.composed()(1.0) == 7.0


def test_self_composition_unit_window():
    vs = self_composition_powers(parse("x^2"), LINEAR, "hs2", 3, SampleGrid.build(0, 1, 17, 17, 200))
    assert [v.kind.value for v in vs] == ["satisfied"] * 3


def test_self_composition_window_escape():
    # squares of [0, 1.2] reach 1.44, outside the window
    vs = self_composition_powers(parse("x^2"), LINEAR, "hs2", 3, SampleGrid.build(0, 1.2, 17, 17, 200))
    assert [v.kind.value for v in vs] == ["satisfied", "inconclusive", "inconclusive"]


def test_self_composition_shift_escapes():
    vs = self_composition_powers(parse("x+1"), LINEAR, "hs2", 3, SampleGrid.build(0, 1, 9, 9, 20))
    assert vs[0].satisfied
    assert [v.kind.value for v in vs[1:]] == ["inconclusive", "inconclusive"]
    assert "escapes" in vs[1].reason


def test_self_composition_identity():
    vs = self_composition_powers(parse("x"), HKernel.from_text("t", 0.5), "hs2", 5, SMALL)
    assert all(v.satisfied for v in vs)


def test_self_composition_capped():
    vs = self_composition_powers(parse("x"), LINEAR, "hs2", 9, SampleGrid.build(0, 1, 5, 5, 0))
    assert len(vs) == 5

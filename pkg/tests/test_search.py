import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsconvex.errors import UsageError
from hsconvex.report import to_json
from hsconvex.search import (BIN_EDGES, ClaimSpec, draw_binding, family_function, replay_witness, run_trial,
                             search_counterexample)

INCLUSION = ClaimSpec("inclusion", {"which": "obs1", "s": 1.0}, {"c": (0.1, 0.9)}, 200, 7)


def test_shrunk_kernel_search_finds_violation():
    r = search_counterexample(INCLUSION)
    assert r.violations > 0
    w = r.worst_witness
    assert w["violated"]
    again = run_trial("inclusion", w["binding"])
    assert again.slack == r.min_slack
    assert (again.lhs, again.rhs) == (w["lhs"], w["rhs"])


def test_identity_search_has_no_violation():
    r = search_counterexample(ClaimSpec("identity", {"lemma": "lemma213"}, {"coef": (-2, 2)}, 100, 0))
    assert r.violations == 0 and r.inconclusive == 0
    assert abs(r.min_slack) <= 1e-9


def test_search_deterministic():
    assert to_json(search_counterexample(INCLUSION)) == to_json(search_counterexample(INCLUSION))


@pytest.mark.parametrize("spec", [
    INCLUSION,
    ClaimSpec("membership", {"class": "hs2", "lo": 0, "hi": 2}, {"c": (0.5, 1.5)}, 15, 1),
    ClaimSpec("compose-condition", {}, {"c": (0.5, 1.5), "s": (0.3, 1)}, 30, 2),
    ClaimSpec("bound", {"theorem": "2.16"}, {}, 30, 1),
    ClaimSpec("proposition", {"which": "p33"}, {}, 30, 1),
    ClaimSpec("identity", {"lemma": "lemma214", "family": "neg-log"}, {}, 20, 5),
    ClaimSpec("bound", {"theorem": "2.17", "family": "exp-affine"}, {}, 20, 3),
])
def test_worst_witness_replays(spec):
    r = search_counterexample(spec)
    assert r.violations <= r.trials
    again = replay_witness(r)
    assert abs(again.slack - r.min_slack) <= 1e-12 * max(1.0, abs(r.min_slack))


@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 2 ** 31))
def test_budget_extension_keeps_violations(b1, b2, seed):
    small, large = sorted((b1, b2))
    spec = lambda budget: ClaimSpec("inclusion", {"which": "obs1"}, {"c": (0.5, 1.5)}, budget, seed)
    found_small = set(search_counterexample(spec(small)).violating_trials)
    found_large = set(search_counterexample(spec(large)).violating_trials)
    assert found_small <= found_large


def test_trial_bindings_prefix_stable():
    a = ClaimSpec("bound", {"theorem": "2.9"}, {}, 5, 11)
    b = ClaimSpec("bound", {"theorem": "2.9"}, {}, 50, 11)
    assert [draw_binding(a, i) for i in range(5)] == [draw_binding(b, i) for i in range(5)]


def test_histogram_counts_conclusive_trials():
    r = search_counterexample(ClaimSpec("compose-condition", {}, {"c": (0.5, 1.5)}, 40, 4))
    assert sum(r.slack_histogram) == r.trials - r.inconclusive
    assert len(r.slack_histogram) == len(BIN_EDGES) - 1


def test_inconclusive_not_counted_as_violation():
    spec = ClaimSpec("bound", {"theorem": "2.9", "require_hypotheses": True}, {}, 30, 1)
    r = search_counterexample(spec)
    assert r.inconclusive > 0
    assert r.violations == 0


def test_poly_family_nonnegative_on_window():
    binding = {"c0": -2.0, "c1": 1.0, "c2": -2.0, "c3": 1.5}
    f = family_function(binding, 0.0, 3.0)
    assert min(f(0.0 + 3.0 * i / 300) for i in range(301)) >= 0


@pytest.mark.parametrize("kwargs", [
    dict(claim_id="nope"),
    dict(claim_id="inclusion", budget=0),
    dict(claim_id="inclusion", seed=-1),
    dict(claim_id="inclusion", space={"c": (2, 1)}),
    dict(claim_id="inclusion", space={"s": (0, 1)}),
    dict(claim_id="bound", space={"p": (0.5, 2)}),
    dict(claim_id="bound", space={"gap": (0, 1)}),
    dict(claim_id="proposition", space={"n": (1, 3)}),
])
def test_malformed_specs(kwargs):
    with pytest.raises(UsageError):
        ClaimSpec(**kwargs)


def test_unknown_family_is_usage_error():
    with pytest.raises(UsageError):
        search_counterexample(ClaimSpec("identity", {"family": "weird"}, {}, 2, 0))

import csv
import io
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsconvex.classes import SampleGrid, Verdict, VerdictKind, check_membership
from hsconvex.expr import parse
from hsconvex.hh import IntervalSpec, verify_hh_upper, verify_trapezoid_bounds
from hsconvex.kernels import HKernel
from hsconvex.quadrature import integrate
from hsconvex.report import (CSV_COLUMNS, dumps, format_float, from_json, overall, render, to_csv, to_json,
                             to_table, verdict_of)
from hsconvex.search import ClaimSpec, search_counterexample

LINEAR = HKernel.from_text("t", 1)


def sample_reports():
    return [
        verify_trapezoid_bounds(parse("x^3"), LINEAR, IntervalSpec(0, 1)),
        verify_hh_upper(parse("x^2"), LINEAR, IntervalSpec(0, 1)),
        check_membership(parse("sqrt(x)"), LINEAR, "hs2", SampleGrid.build(0, 1, 9, 9, 20)),
        search_counterexample(ClaimSpec("inclusion", {"which": "obs1"}, {"c": (0.1, 0.9)}, 10, 7)),
        integrate(lambda t: t * t, 0, 1),
    ]


@pytest.mark.parametrize("index", range(5))
def test_json_round_trip(index):
    report = sample_reports()[index]
    assert from_json(to_json(report)) == report


def test_serialization_is_byte_identical():
    a, b = sample_reports(), sample_reports()
    for fmt in ("json", "csv", "table"):
        assert render(a, fmt, {"command": "x"}) == render(b, fmt, {"command": "x"})


def test_csv_one_row_per_bound():
    report = verify_hh_upper(parse("x^2"), LINEAR, IntervalSpec(0, 1))
    table = list(csv.DictReader(io.StringIO(to_csv([report]))))
    assert len(table) == len(report.bounds) >= 2
    assert {row["claim"] for row in table} == {"thm2.9"}
    assert tuple(table[0]) == CSV_COLUMNS


def test_csv_seventeen_digits():
    report = verify_hh_upper(parse("x^2"), LINEAR, IntervalSpec(0, 1))
    row = next(csv.DictReader(io.StringIO(to_csv([report]))))
    assert float(row["lhs"]) == report.lhs
    assert row["lhs"] == format(report.lhs, ".17g")


def test_inconclusive_json_has_reason():
    v = check_membership(parse("ln(x)+5"), LINEAR, "hs2", SampleGrid.build(0, 1, 5, 5, 0))
    data = json.loads(to_json(v))
    assert data["verdict"] == "inconclusive" and data["reason"]


@given(st.floats(allow_nan=False))
def test_float_round_trip(x):
    assert float(format_float(x)) == x


def test_special_floats():
    assert format_float(math.inf) == "Infinity"
    assert format_float(-math.inf) == "-Infinity"
    assert format_float(1.0) == "1.0"
    assert format_float(1e300) == "1.0000000000000001e+300"
    assert json.loads(dumps({"v": math.inf}))["v"] == math.inf


def test_dumps_sorts_keys():
    assert dumps({"b": 1, "a": [1.5, None, True, "s"]}) == json.dumps(
        {"a": [1.5, None, True, "s"], "b": 1}, indent=2, sort_keys=True) + "\n"


def test_overall_violated_dominates():
    violated = Verdict("c", VerdictKind.VIOLATED, 1.0, 1, 1e-9)
    inconclusive = Verdict("c", VerdictKind.INCONCLUSIVE, None, 0, 1e-9, reason="r")
    satisfied = Verdict("c", VerdictKind.SATISFIED, 0.0, 1, 1e-9)
    assert overall([satisfied, inconclusive, violated]) == "violated"
    assert overall([satisfied, inconclusive]) == "inconclusive"
    assert overall([satisfied]) == "ok"
    assert verdict_of({"verdict": "fails"}) == "violated"


def test_table_mentions_witness():
    v = check_membership(parse("sqrt(x)"), LINEAR, "hs2", SampleGrid.build(0, 1, 9, 9, 20))
    text = to_table([v], {"command": "membership", "config": {"claim_tol": 1e-9}})
    assert "witness: x=" in text and "VIOLATED" in text and "claim_tol=1e-09" in text

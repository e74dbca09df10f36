import io
import json

import pytest

from hsconvex.cli import run


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, err = invoke(*argv, "--format", "json")
    return code, json.loads(out)


def test_identity_example():
    code, doc = invoke_json("identity", "--lemma", "2.13", "--F", "x^3", "--a", "0", "--b", "1")
    assert code == 0
    result = doc["results"][0]
    assert result["lhs"] == pytest.approx(0.5, abs=1e-12)
    assert result["bounds"][0]["value"] == pytest.approx(0.5, abs=1e-12)


def test_membership_example():
    code, doc = invoke_json("membership", "--f", "sqrt(x)", "--class", "hs2", "--h", "t", "--s", "1",
                            "--lo", "0", "--hi", "1")
    assert code == 1
    w = doc["results"][0]["witness"]
    assert w["lhs"] > w["rhs"]


def test_missing_p_is_usage_error():
    code, out, err = invoke("bound", "--theorem", "2.17", "--F", "x^3", "--a", "0", "--b", "1", "--h", "t",
                            "--s", "1")
    assert code == 64 and out == "" and "--p" in err


@pytest.mark.parametrize("argv", [
    ["identity", "--lemma", "2.13", "--F", "x^3", "--a", "0", "--b", "1", "--bogus"],
    ["nosuch"],
    [],
    ["parse", "--expr", "2*+x"],
    ["parse", "--expr", "x*y"],
    ["kconst", "--h", "t", "--s", "0"],
    ["means", "--kind", "L", "--a", "2", "--b", "2"],
    ["integrate", "--f", "x", "--a", "0", "--b", "1", "--tol", "-1"],
    ["search", "--claim", "inclusion", "--range", "c:2:1"],
    ["identity", "--lemma", "2.13", "--F", "x^3", "--a", "0", "--b", "1", "--format", "xml"],
])
def test_usage_errors(argv):
    code, out, err = invoke(*argv)
    assert code == 64
    assert out == "" and err


def test_syntax_error_reports_offset():
    code, _, err = invoke("parse", "--expr", "2*+x")
    assert code == 64 and "byte 2" in err


def test_json_is_deterministic_and_echoes_config():
    argv = ["search", "--claim", "inclusion", "--which", "obs1", "--range", "c=0.1:0.9", "--budget", "50",
            "--seed", "7", "--format", "json"]
    first, second = invoke(*argv), invoke(*argv)
    assert first == second
    doc = json.loads(first[1])
    assert doc["header"]["config"]["seed"] == 7
    assert doc["header"]["config"]["claim_tol"] == 1e-9
    assert doc["header"]["args"]["budget"] == 50
    assert first[0] == 1 and doc["results"][0]["violations"] > 0


def test_tolerance_override_is_echoed():
    _, doc = invoke_json("kconst", "--h", "t", "--s", "1", "--tol", "1e-6", "--quad-tol", "1e-8")
    assert doc["header"]["config"]["claim_tol"] == 1e-6
    assert doc["header"]["config"]["quad_tol"] == 1e-8


def test_out_file(tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = invoke("kconst", "--h", "t", "--s", "0.5", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["results"][0]["value"] == pytest.approx(2 / 3, abs=1e-10)


def test_out_unwritable(tmp_path):
    code, _, err = invoke("kconst", "--h", "t", "--s", "1", "--out", str(tmp_path / "no" / "such" / "file"))
    assert code == 64 and "cannot write" in err


@pytest.mark.parametrize("argv, expected", [
    (["parse", "--expr", "x^2", "--at", "3"], 0),
    (["integrate", "--f", "abs(1-2*x)^3", "--a", "0", "--b", "1", "--kinks", "0.5"], 0),
    (["kconst", "--h", "1/t", "--s", "0.5"], 0),
    (["kconst", "--h", "1/t", "--s", "1"], 2),
    (["membership", "--f", "x^2", "--class", "hs2", "--h", "t", "--s", "1", "--lo", "0", "--hi", "4"], 0),
    (["membership", "--f=-x", "--class", "hs2", "--h", "t", "--s", "1"], 2),
    (["inclusion", "--which", "obs1", "--h", "t/2", "--s", "1"], 1),
    (["inclusion", "--which", "obs1", "--h", "t", "--s", "0.5", "--f", "x^2"], 0),
    (["compose-check", "--condition", "thm26-leq", "--h", "2*t", "--s", "1"], 1),
    (["compose-check", "--f", "x^2", "--g", "x^2", "--theorem", "2.6", "--h", "t", "--s", "1"], 0),
    (["compose-check", "--f", "x^2", "--self-powers", "3", "--h", "t", "--s", "1", "--lo", "0", "--hi", "1"], 0),
    (["identity", "--lemma", "2.14", "--F", "exp(x)", "--a", "0", "--b", "1"], 0),
    (["bound", "--theorem", "2.9", "--F", "x^2", "--a", "0", "--b", "1", "--h", "t", "--s", "1"], 0),
    (["bound", "--theorem", "2.15", "--F", "exp(x)", "--a", "0", "--b", "1", "--h", "t", "--s", "0.5"], 0),
    (["bound", "--theorem", "2.16", "--F", "x^3", "--a", "0", "--b", "1"], 1),
    (["bound", "--theorem", "2.17", "--F", "x^3", "--a", "0", "--b", "1", "--h", "t", "--s", "1", "--p", "2"], 0),
    (["means", "--kind", "Ap", "--order", "2", "--a", "1", "--b", "3"], 0),
    (["proposition", "--which", "3.2", "--a", "1", "--b", "2"], 0),
    (["proposition", "--which", "p31", "--a-grid", "0.5:2:4", "--gap-grid", "0.1:2:4", "--p", "2,3"], 1),
    (["search", "--claim", "identity", "--lemma", "lemma213", "--budget", "20"], 0),
])
def test_command_smoke(argv, expected):
    for fmt in ("table", "json", "csv"):
        code, out, err = invoke(*argv, "--format", fmt)
        assert code == expected, err
        assert out


def test_precondition_report_carries_reason():
    code, doc = invoke_json("membership", "--f=-x", "--class", "hs2", "--h", "t", "--s", "1")
    assert code == 2
    assert doc["verdict"] == "inconclusive"
    assert doc["results"][0]["reason"]


def test_csv_rows_share_claim():
    code, out, _ = invoke("bound", "--theorem", "2.9", "--F", "x^2", "--a", "0", "--b", "1", "--h", "t", "--s",
                          "1", "--format", "csv")
    lines = out.strip().splitlines()
    assert len(lines) >= 3
    assert all(line.startswith("thm2.9,") for line in lines[1:])

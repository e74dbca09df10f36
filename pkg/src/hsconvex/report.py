"""Serialization of reports to json, csv and a plain-text table.

Floats are written with 17 significant digits, so every value parses back
to the identical double.  Keys are sorted, so identical reports give
identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

from .classes import Verdict, VerdictKind, Witness
from .hh import Bound, BoundChainReport
from .quadrature import QuadResult
from .search import SearchReport

FORMATS = ("table", "json", "csv")


# ---------------------------------------------------------------------------
# dict conversion
# ---------------------------------------------------------------------------

def _witness_dict(w: Witness | None):
    if w is None:
        return None
    return {"t": w.t, "lhs": w.lhs, "rhs": w.rhs, "x": w.x, "y": w.y, "violation": w.violation}


def to_dict(report: Any) -> dict:
    if isinstance(report, Verdict):
        return {"type": "verdict", "claim": report.claim, "verdict": report.kind.value,
                "max_violation": report.max_violation, "samples_checked": report.samples_checked,
                "tolerance": report.tolerance, "witness": _witness_dict(report.witness),
                "reason": report.reason, "details": report.details}
    if isinstance(report, BoundChainReport):
        return {"type": "bound_chain", "claim": report.claim_id, "verdict": report.verdict,
                "lhs": report.lhs, "relation": report.relation,
                "bounds": [{"label": b.label, "value": b.value, "provenance": b.provenance, "slack": b.slack,
                            "verdict": b.verdict, "lhs": b.lhs, "note": b.note} for b in report.bounds],
                "slacks": report.slacks, "quadrature_error": report.quadrature_error,
                "tolerance": report.tolerance, "hypotheses": report.hypotheses, "notes": list(report.notes),
                "reason": report.reason, "inputs": report.inputs, "details": report.details}
    if isinstance(report, SearchReport):
        return {"type": "search", "claim": report.claim_id, "verdict": report.verdict,
                "trials": report.trials, "violations": report.violations, "inconclusive": report.inconclusive,
                "worst_witness": report.worst_witness, "min_slack": report.min_slack,
                "slack_histogram": list(report.slack_histogram), "seed": report.seed,
                "violating_trials": list(report.violating_trials), "tolerance": report.tolerance,
                "fixed": report.fixed, "space": {k: list(v) for k, v in report.space.items()}}
    if isinstance(report, QuadResult):
        return {"type": "quadrature", "value": report.value, "error": report.error,
                "evaluations": report.evaluations, "converged": report.converged, "note": report.note}
    if isinstance(report, dict):
        return report
    raise TypeError(f"cannot serialize {type(report).__name__}")


def from_dict(data: dict) -> Any:
    kind = data.get("type")
    if kind == "verdict":
        w = data["witness"]
        witness = None if w is None else Witness(w["t"], w["lhs"], w["rhs"], w["x"], w["y"])
        return Verdict(data["claim"], VerdictKind(data["verdict"]), data["max_violation"],
                       data["samples_checked"], data["tolerance"], witness, data["reason"], data["details"])
    if kind == "bound_chain":
        bounds = tuple(Bound(b["label"], b["value"], b["provenance"], b["slack"], b["verdict"], b["lhs"], b["note"])
                       for b in data["bounds"])
        return BoundChainReport(data["claim"], data["lhs"], bounds, data["quadrature_error"], data["tolerance"],
                                data["relation"], data["hypotheses"], tuple(data["notes"]), data["reason"],
                                data["inputs"], data["details"])
    if kind == "search":
        return SearchReport(data["claim"], data["trials"], data["violations"], data["inconclusive"],
                            data["worst_witness"], data["min_slack"], tuple(data["slack_histogram"]),
                            data["seed"], tuple(data["violating_trials"]), data["tolerance"], data["fixed"],
                            {k: tuple(v) for k, v in data["space"].items()})
    if kind == "quadrature":
        return QuadResult(data["value"], data["error"], data["evaluations"], data["converged"], data["note"])
    return data


def verdict_of(report: Any) -> str:
    """Normalised verdict: ``ok``, ``violated`` or ``inconclusive``."""
    if isinstance(report, Verdict):
        raw = report.kind.value
    elif isinstance(report, (BoundChainReport, SearchReport)):
        raw = report.verdict
    elif isinstance(report, QuadResult):
        raw = "ok" if report.converged else "inconclusive"
    elif isinstance(report, dict):
        raw = report.get("verdict", "ok")
    else:
        raw = "ok"
    return {"violated": "violated", "fails": "violated", "inconclusive": "inconclusive"}.get(raw, "ok")


# ---------------------------------------------------------------------------
# json
# ---------------------------------------------------------------------------

def format_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    text = format(v, ".17g")
    if not any(c in text for c in ".e"):
        text += ".0"
    return text


def _emit(value: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = sorted(value.items(), key=lambda kv: str(kv[0]))
        for i, (k, v) in enumerate(items):
            out.append(f"{pad}  {json.dumps(str(k))}: ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(value):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(value, bool) or value is None:
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif hasattr(value, "value") and isinstance(value.value, str):
        out.append(json.dumps(value.value))
    else:
        raise TypeError(f"cannot encode {type(value).__name__} as json")


def dumps(value: Any) -> str:
    out: list[str] = []
    _emit(value, 0, out)
    return "".join(out) + "\n"


def to_json(report: Any) -> str:
    return dumps(to_dict(report))


def from_json(text: str) -> Any:
    return from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# csv and table
# ---------------------------------------------------------------------------

CSV_COLUMNS = ("claim", "label", "provenance", "lhs", "value", "slack", "verdict", "tolerance",
               "quadrature_error", "reason")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def rows(report: Any) -> list[dict]:
    """One row per (claim, bound); reports without bounds give a single row."""
    if isinstance(report, BoundChainReport):
        if not report.bounds:
            return [{"claim": report.claim_id, "lhs": report.lhs, "verdict": report.verdict,
                     "tolerance": report.tolerance, "reason": report.reason}]
        return [{"claim": report.claim_id, "label": b.label, "provenance": b.provenance,
                 "lhs": b.lhs if b.lhs is not None else report.lhs, "value": b.value, "slack": b.slack,
                 "verdict": b.verdict, "tolerance": report.tolerance,
                 "quadrature_error": report.quadrature_error, "reason": b.note or report.reason}
                for b in report.bounds]
    if isinstance(report, Verdict):
        w = report.witness
        return [{"claim": report.claim, "label": "witness" if w else "", "lhs": w.lhs if w else None,
                 "value": w.rhs if w else None,
                 "slack": None if report.max_violation is None else 0.0 - report.max_violation,
                 "verdict": report.kind.value, "tolerance": report.tolerance, "reason": report.reason}]
    if isinstance(report, SearchReport):
        w = report.worst_witness or {}
        return [{"claim": report.claim_id, "label": w.get("label") or "worst-witness", "lhs": w.get("lhs"),
                 "value": w.get("rhs"), "slack": report.min_slack, "verdict": report.verdict,
                 "tolerance": report.tolerance,
                 "reason": f"{report.violations} violations, {report.inconclusive} inconclusive "
                           f"in {report.trials} trials"}]
    if isinstance(report, QuadResult):
        return [{"claim": "integrate", "label": "value", "value": report.value,
                 "quadrature_error": report.error, "verdict": "converged" if report.converged else "unconverged",
                 "reason": report.note}]
    d = to_dict(report)
    return [{"claim": d.get("claim", d.get("type", "")), "label": d.get("label", ""), "value": d.get("value"),
             "verdict": d.get("verdict", ""), "reason": d.get("reason", "")}]


def to_csv(reports: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in reports:
        for row in rows(report):
            writer.writerow([_cell(row.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def to_table(reports: list, header: dict | None = None) -> str:
    lines = []
    if header:
        lines.append(f"command: {header.get('command', '')}")
        args = header.get("args", {})
        if args:
            lines.append("args: " + ", ".join(f"{k}={v}" for k, v in sorted(args.items()) if v is not None))
        config = header.get("config", {})
        lines.append("config: " + ", ".join(f"{k}={v}" for k, v in sorted(config.items())))
        lines.append("")
    for report in reports:
        for row in rows(report):
            parts = [f"{row.get('claim', '')}"]
            if row.get("label"):
                parts.append(f"[{row['label']}]")
            for key in ("lhs", "value", "slack"):
                if row.get(key) is not None:
                    v = row[key]
                    parts.append(f"{key}={v:.12g}" if isinstance(v, float) else f"{key}={v}")
            parts.append(str(row.get("verdict", "")).upper())
            if row.get("reason"):
                parts.append(f"({row['reason']})")
            lines.append("  ".join(parts))
        if isinstance(report, Verdict) and report.witness is not None:
            w = report.witness
            where = ", ".join(f"{k}={v!r}" for k, v in (("x", w.x), ("y", w.y), ("t", w.t)) if v is not None)
            lines.append(f"  witness: {where}")
        if isinstance(report, BoundChainReport):
            for name, state in report.hypotheses.items():
                lines.append(f"  hypothesis {name}: {state}")
            for note in report.notes:
                lines.append(f"  note: {note}")
        if isinstance(report, SearchReport) and report.worst_witness is not None:
            lines.append(f"  worst binding: {report.worst_witness['binding']}")
    return "\n".join(lines) + "\n"


def render(reports: list, fmt: str, header: dict) -> str:
    if fmt == "json":
        worst = overall(reports)
        return dumps({"header": header, "verdict": worst, "results": [to_dict(r) for r in reports]})
    if fmt == "csv":
        return to_csv(reports)
    return to_table(reports, header)


def overall(reports: list) -> str:
    states = [verdict_of(r) for r in reports]
    if "violated" in states:
        return "violated"
    if "inconclusive" in states:
        return "inconclusive"
    return "ok"

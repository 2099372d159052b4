"""Machine-readable (JSON) and text renderings of an analysis report.

Every significance is stored unrounded together with its power and the
one-decimal display string, so a report can be re-read without loss.
"""

from __future__ import annotations

import json
import math
from decimal import ROUND_HALF_UP, Decimal

from .aggregate import CandidateStats, PrecinctSummary
from .analysis import Report
from .runstats import Significance

FORMAT = "ballotruns-report/1"

_ROW_SIGNIFICANCES = ("alpha0", "alpha1", "alpha_tilde", "alpha_check")


def display(x: float) -> str:
    """One decimal, halves rounded up (12.25 -> '12.3')."""
    if math.isinf(x):
        return "inf"
    return str(Decimal(repr(x)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _sig(s: Significance | None):
    if s is None:
        return None
    return {"alpha": s.alpha, "power": s.power, "display": display(s.power)}


def _row_to_dict(row: CandidateStats) -> dict:
    return {
        "candidate": row.candidate,
        "r0": row.r0,
        "s0": row.s0,
        "alpha0": _sig(row.alpha0),
        "r1": row.r1,
        "s1": row.s1,
        "alpha1": _sig(row.alpha1),
        "m": row.m,
        "alpha_tilde": _sig(row.alpha_tilde),
        "alpha_check": _sig(row.alpha_check),
        "suspicious": dict(row.suspicious),
    }


def _row_from_dict(d: dict) -> CandidateStats:
    sigs = {k: (Significance(d[k]["alpha"]) if d.get(k) is not None else None) for k in _ROW_SIGNIFICANCES}
    return CandidateStats(candidate=d["candidate"], r0=d["r0"], s0=d["s0"], r1=d["r1"], s1=d["s1"],
                          m=d["m"], suspicious=dict(d["suspicious"]), **sigs)


def _summary_to_dict(s: PrecinctSummary) -> dict:
    return {
        "precinct_id": s.precinct_id,
        "c": s.c,
        "alpha_min": s.alpha_min,
        "alpha_tilde_min": s.alpha_tilde_min,
        "alpha_prime": _sig(Significance(s.alpha_prime)),
        "alpha_tilde_prime": _sig(Significance(s.alpha_tilde_prime)),
        "suspicious": dict(s.suspicious),
    }


def _summary_from_dict(d: dict) -> PrecinctSummary:
    return PrecinctSummary(
        precinct_id=d["precinct_id"],
        c=d["c"],
        alpha_min=d["alpha_min"],
        alpha_tilde_min=d["alpha_tilde_min"],
        alpha_prime=d["alpha_prime"]["alpha"],
        alpha_tilde_prime=d["alpha_tilde_prime"]["alpha"],
        suspicious=dict(d["suspicious"]),
    )


def to_dict(report: Report) -> dict:
    return {
        "format": FORMAT,
        "precinct_id": report.precinct_id,
        "n": report.n,
        "c": report.c,
        "invalid_count": report.invalid_count,
        "config": dict(report.config),
        "leaders": list(report.leaders),
        "tuned_leaders": list(report.tuned_leaders),
        "candidates": [_row_to_dict(r) for r in report.candidates],
        "consolidated": _row_to_dict(report.consolidated),
        "tuned": _row_to_dict(report.tuned),
        "summary": _summary_to_dict(report.summary),
        "warnings": list(report.warnings),
    }


def from_dict(d: dict) -> Report:
    if d.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    return Report(
        precinct_id=d["precinct_id"],
        n=d["n"],
        c=d["c"],
        invalid_count=d["invalid_count"],
        config=dict(d["config"]),
        candidates=[_row_from_dict(r) for r in d["candidates"]],
        consolidated=_row_from_dict(d["consolidated"]),
        tuned=_row_from_dict(d["tuned"]),
        summary=_summary_from_dict(d["summary"]),
        leaders=list(d["leaders"]),
        tuned_leaders=list(d["tuned_leaders"]),
        warnings=list(d["warnings"]),
    )


def dumps(report: Report) -> str:
    return json.dumps(to_dict(report), indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Report:
    return from_dict(json.loads(text))


def _cell(sig, flag):
    if sig is None:
        return "-"
    return display(sig.power) + ("*" if flag else "")


def format_row(row: CandidateStats) -> list[str]:
    sus = row.suspicious
    return [
        str(row.r0), str(row.s0), _cell(row.alpha0, sus.get("alpha0")),
        str(row.r1), str(row.s1), _cell(row.alpha1, sus.get("alpha1")),
        str(row.m), _cell(row.alpha_tilde, sus.get("alpha_tilde")),
        _cell(row.alpha_check, sus.get("alpha_check")),
    ]


def render_table(report: Report) -> str:
    """Plain-text tables; suspicious powers carry a trailing '*'."""
    header = ["", "r0", "s0", "pa0", "r1", "s1", "pa1", "m", "pa~", "pa^"]
    body = [[r.candidate] + format_row(r) for r in report.candidates]
    body.append(["[all of top-%s]" % report.config.get("top_k", 5)] + format_row(report.consolidated))
    body.append(["[only top-%s]" % report.config.get("tuned_k", 6)] + format_row(report.tuned))
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    lines = [f"Precinct {report.precinct_id}: n = {report.n}, c = {report.c}"]
    fmt = lambda cells: "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths)))
    lines.append(fmt(header))
    lines.extend(fmt(row) for row in body)
    s = report.summary
    lines.append(
        "summary: pa' = {}{}  pa~' = {}{}".format(
            display(s.p_alpha_prime), "*" if s.suspicious.get("alpha_prime") else "",
            display(s.p_alpha_tilde_prime), "*" if s.suspicious.get("alpha_tilde_prime") else "",
        )
    )
    lines.append("leaders: " + ", ".join(report.leaders))
    for w in report.warnings:
        lines.append("warning: " + w)
    return "\n".join(lines) + "\n"

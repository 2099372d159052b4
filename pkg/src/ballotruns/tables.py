"""Published result tables shipped with the package, and their recomputation.

The data files under ``ballotruns/data`` hold the integer inputs
(n, r0, s0, r1, s1, m) of every published row next to the printed one-decimal
powers. :func:`verify_tables` recomputes each power from the integers alone.

The stationarity powers are carried but never checked: they depend on the
order of the flags, which the integer summary does not retain.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, replace
from importlib import resources

from .aggregate import overall_alpha_prime, overall_alpha_tilde_prime
from .runstats import BernoulliModel, exact_longest_run_alpha, exact_run_count_alpha, power

TOLERANCE = 0.05
_SLACK = 1e-9


@dataclass(frozen=True)
class TableRow:
    kind: str  # "candidate", "consolidated" or "tuned"
    precinct: int
    label: str
    n: int
    r0: int
    s0: int
    p_alpha0: float
    r1: int
    s1: int
    p_alpha1: float
    m: int
    p_alpha_tilde: float
    p_alpha_check: float
    party: str = ""

    def perturbed(self, **changes) -> "TableRow":
        return replace(self, **changes)


@dataclass(frozen=True)
class SummaryRow:
    precinct: int
    district: int
    c: int
    n: int
    p_alpha_prime: float
    p_alpha_tilde_prime: float


@dataclass(frozen=True)
class Dataset:
    candidates: tuple[TableRow, ...]
    consolidated: tuple[TableRow, ...]
    tuned: tuple[TableRow, ...]
    summary: tuple[SummaryRow, ...]

    def rows(self):
        return self.candidates + self.consolidated + self.tuned


def _read_csv(name):
    text = resources.files("ballotruns.data").joinpath(name).read_text(encoding="utf-8")
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def _row(kind, d):
    return TableRow(
        kind=kind,
        precinct=int(d["precinct"]),
        label=d.get("candidate") or kind,
        party=d.get("party", ""),
        n=int(d["n"]),
        r0=int(d["r0"]),
        s0=int(d["s0"]),
        p_alpha0=float(d["p_alpha0"]),
        r1=int(d["r1"]),
        s1=int(d["s1"]),
        p_alpha1=float(d["p_alpha1"]),
        m=int(d["m"]),
        p_alpha_tilde=float(d["p_alpha_tilde"]),
        p_alpha_check=float(d["p_alpha_check"]),
    )


def load_dataset() -> Dataset:
    return Dataset(
        candidates=tuple(_row("candidate", d) for d in _read_csv("candidates.csv")),
        consolidated=tuple(_row("consolidated", d) for d in _read_csv("consolidated.csv")),
        tuned=tuple(_row("tuned", d) for d in _read_csv("tuned.csv")),
        summary=tuple(
            SummaryRow(int(d["precinct"]), int(d["district"]), int(d["c"]), int(d["n"]),
                       float(d["p_alpha_prime"]), float(d["p_alpha_tilde_prime"]))
            for d in _read_csv("summary.csv")
        ),
    )


@dataclass(frozen=True)
class RowResult:
    """Unrounded significances recomputed from one row's integers."""

    row: TableRow
    alpha0: float
    alpha1: float
    alpha_tilde: float


def compute_row(row: TableRow) -> RowResult:
    if row.r0 + row.r1 != row.n:
        raise ValueError(f"{row.kind} {row.precinct} {row.label}: r0 + r1 != n")
    a0 = exact_longest_run_alpha(BernoulliModel(row.n, row.r0 / row.n), row.s0).alpha
    a1 = exact_longest_run_alpha(BernoulliModel(row.n, row.r1 / row.n), row.s1).alpha
    at = exact_run_count_alpha(BernoulliModel(row.n, row.r1 / row.n), row.m).alpha
    return RowResult(row, a0, a1, at)


@dataclass(frozen=True)
class Check:
    name: str
    printed: float
    computed: float

    @property
    def diff(self) -> float:
        return self.computed - self.printed

    @property
    def ok(self) -> bool:
        return abs(self.diff) <= TOLERANCE + _SLACK


@dataclass
class Verification:
    checks: list
    results: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]


def precinct_minima(results) -> dict[int, tuple[float, float]]:
    """Per precinct (alpha_min, alpha_tilde_min) over candidate rows."""
    acc = defaultdict(lambda: [1.0, 1.0])
    for res in results:
        if res.row.kind != "candidate":
            continue
        cur = acc[res.row.precinct]
        cur[0] = min(cur[0], res.alpha0, res.alpha1)
        cur[1] = min(cur[1], res.alpha_tilde)
    return {k: (v[0], v[1]) for k, v in acc.items()}


def verify_tables(dataset: Dataset | None = None) -> Verification:
    """Recompute every printed power (stationarity excluded) and compare within ±0.05."""
    dataset = dataset or load_dataset()
    checks = []
    results = []
    for row in dataset.rows():
        res = compute_row(row)
        results.append(res)
        tag = f"{row.kind} {row.precinct} {row.label}"
        checks.append(Check(f"{tag} p_alpha0", row.p_alpha0, power(res.alpha0)))
        checks.append(Check(f"{tag} p_alpha1", row.p_alpha1, power(res.alpha1)))
        checks.append(Check(f"{tag} p_alpha_tilde", row.p_alpha_tilde, power(res.alpha_tilde)))
    minima = precinct_minima(results)
    for s in dataset.summary:
        a_min, at_min = minima[s.precinct]
        checks.append(Check(f"summary {s.precinct} p_alpha_prime", s.p_alpha_prime,
                            power(overall_alpha_prime(a_min, s.c))))
        checks.append(Check(f"summary {s.precinct} p_alpha_tilde_prime", s.p_alpha_tilde_prime,
                            power(overall_alpha_tilde_prime(at_min, s.c))))
    return Verification(checks, results)


def format_verification(v: Verification, verbose: bool = True) -> str:
    lines = []
    for c in v.checks:
        if verbose or not c.ok:
            status = "ok  " if c.ok else "FAIL"
            lines.append(f"{status} {c.name:<50} printed {c.printed:5.1f}  computed {c.computed:8.4f}  diff {c.diff:+.4f}")
    lines.append(f"{len(v.checks) - len(v.failures)}/{len(v.checks)} values within ±{TOLERANCE}")
    lines.append("stationarity powers are not checked: they need the raw flag order, which is unpublished")
    return "\n".join(lines) + "\n"

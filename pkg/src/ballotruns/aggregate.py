"""Per-candidate result rows and precinct-level multiplicity correction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DomainError, InsufficientDataError
from .flagseq import FlagSequence, run_stats
from .runstats import (
    BernoulliModel,
    Significance,
    exact_longest_run_alpha,
    exact_run_count_alpha,
    exact_run_count_alphas,
    power,
)

# Below this the corrected significance is evaluated as k * x.
LINEAR_SWITCHOVER = 1e-8


@dataclass(frozen=True)
class Thresholds:
    """Trial counts t behind the 1/t suspicion thresholds.

    ``None`` means derive from the data: ``c * precincts * 2`` for
    per-candidate longest runs, ``c * precincts`` for per-candidate run counts,
    ``precincts * 2`` / ``precincts`` for the consolidated rows and
    ``precincts`` for the precinct summary. With c = 11 and 9 precincts this
    gives 198, 99, 18, 9 and 9.
    """

    precincts: int = 9
    runs: int | None = None
    count: int | None = None
    group_runs: int | None = None
    group_count: int | None = None
    summary: int | None = None

    def resolve(self, c: int) -> "Thresholds":
        k = self.precincts
        return Thresholds(
            precincts=k,
            runs=self.runs or c * k * 2,
            count=self.count or c * k,
            group_runs=self.group_runs or k * 2,
            group_count=self.group_count or k,
            summary=self.summary or k,
        )


def suspicion_flags(value: float, trials: int) -> bool:
    """True iff ``value`` < 1/trials."""
    if trials < 1:
        raise DomainError("trials must be positive")
    return value < 1.0 / trials


@dataclass(frozen=True)
class CandidateStats:
    """One result row: counts, run statistics and their significances.

    ``alpha_check`` (stationarity) is advisory and may be ``None`` when the
    sequence is too short for the chosen segment count.
    """

    candidate: str
    r0: int
    s0: int
    alpha0: Significance
    r1: int
    s1: int
    alpha1: Significance
    m: int
    alpha_tilde: Significance
    alpha_check: Significance | None = None
    suspicious: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.r0 + self.r1


def candidate_stats(seq: FlagSequence, label: str | None = None, *, runs_trials: int = 198,
                    count_trials: int = 99, segments: int | None = 12,
                    alpha_tilde: Significance | None = None) -> CandidateStats:
    """Compute one result row for a flag sequence.

    Each flag state is tested against its own plug-in probability
    ``r_state / n``. A run-count significance computed elsewhere (see
    :func:`run_count_alphas`) can be passed in as ``alpha_tilde``.
    """
    from .stationarity import stationarity_alpha

    stats = run_stats(seq)
    alphas = {}
    for state in (0, 1):
        model = BernoulliModel.fit(seq, state)
        alphas[state] = exact_longest_run_alpha(model, stats.longest(state))
    if alpha_tilde is None:
        alpha_tilde = exact_run_count_alpha(BernoulliModel.fit(seq, 1), stats.m)
    alpha_check = None
    if segments is not None and seq.n >= segments:
        alpha_check = stationarity_alpha(seq, segments)
    return CandidateStats(
        candidate=label if label is not None else seq.label,
        r0=seq.r0,
        s0=stats.s0,
        alpha0=alphas[0],
        r1=seq.r1,
        s1=stats.s1,
        alpha1=alphas[1],
        m=stats.m,
        alpha_tilde=alpha_tilde,
        alpha_check=alpha_check,
        suspicious={
            "alpha0": suspicion_flags(alphas[0].alpha, runs_trials),
            "alpha1": suspicion_flags(alphas[1].alpha, runs_trials),
            "alpha_tilde": suspicion_flags(alpha_tilde.alpha, count_trials),
            "alpha_check": alpha_check is not None and suspicion_flags(alpha_check.alpha, count_trials),
        },
    )


def run_count_alphas(seqs: Sequence[FlagSequence]) -> list[Significance]:
    """Run-count significances of equal-length sequences in one shared pass."""
    if not seqs:
        return []
    n = seqs[0].n
    if any(s.n != n for s in seqs):
        raise DomainError("sequences must share one length")
    return exact_run_count_alphas(n, [s.fraction(1) for s in seqs], [run_stats(s).m for s in seqs])


def min_significances(rows: Sequence[CandidateStats]) -> tuple[float, float]:
    """(min over rows and states of alpha_f, min over rows of alpha_tilde)."""
    if not rows:
        raise InsufficientDataError("no candidate rows")
    alpha_min = min(min(r.alpha0.alpha, r.alpha1.alpha) for r in rows)
    alpha_tilde_min = min(r.alpha_tilde.alpha for r in rows)
    return alpha_min, alpha_tilde_min


def corrected(x: float, k: int) -> float:
    """1 - (1 - x)^k, the chance that the least of k honest tests is <= x."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"probability must lie in [0, 1], got {x}")
    if k < 1:
        raise DomainError("number of tests must be positive")
    if x < LINEAR_SWITCHOVER:
        return k * x
    if x == 1.0:
        return 1.0
    return min(1.0, -math.expm1(k * math.log1p(-x)))


def overall_alpha_prime(alpha_min: float, c: int) -> float:
    """Longest-run significance corrected for 2c tests (both flag states)."""
    return corrected(alpha_min, 2 * c)


def overall_alpha_tilde_prime(alpha_tilde_min: float, c: int) -> float:
    """Run-count significance corrected for c tests."""
    return corrected(alpha_tilde_min, c)


@dataclass(frozen=True)
class PrecinctSummary:
    precinct_id: str
    c: int
    alpha_min: float
    alpha_tilde_min: float
    alpha_prime: float
    alpha_tilde_prime: float
    suspicious: dict = field(default_factory=dict)

    @property
    def p_alpha_prime(self) -> float:
        return power(self.alpha_prime)

    @property
    def p_alpha_tilde_prime(self) -> float:
        return power(self.alpha_tilde_prime)

    @property
    def min_prime(self) -> float:
        return min(self.alpha_prime, self.alpha_tilde_prime)


def precinct_summary(transcript, rows: Sequence[CandidateStats], summary_trials: int = 9) -> PrecinctSummary:
    """Combine candidate rows into the precinct verdict values.

    ``transcript`` may be a :class:`~ballotruns.flagseq.Transcript` or any
    object with ``precinct_id`` and ``c`` attributes.
    """
    c = transcript.c
    if len(rows) != c:
        raise InsufficientDataError(f"expected {c} candidate rows, got {len(rows)}")
    alpha_min, alpha_tilde_min = min_significances(rows)
    a1 = overall_alpha_prime(alpha_min, c)
    a2 = overall_alpha_tilde_prime(alpha_tilde_min, c)
    return PrecinctSummary(
        precinct_id=str(transcript.precinct_id),
        c=c,
        alpha_min=alpha_min,
        alpha_tilde_min=alpha_tilde_min,
        alpha_prime=a1,
        alpha_tilde_prime=a2,
        suspicious={
            "alpha_prime": suspicion_flags(a1, summary_trials),
            "alpha_tilde_prime": suspicion_flags(a2, summary_trials),
        },
    )

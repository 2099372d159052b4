"""End-to-end analysis of one transcript."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, fields

from .aggregate import CandidateStats, PrecinctSummary, Thresholds, candidate_stats, precinct_summary, run_count_alphas
from .errors import InsufficientDataError
from .flagseq import (
    DEFAULT_MAX_MARKS,
    RankingTieWarning,
    Transcript,
    candidate_flags,
    consolidated_flags,
    rank_candidates,
    tuned_flags,
)
from .stationarity import DEFAULT_SEGMENTS, SparseSegmentWarning


@dataclass(frozen=True)
class Config:
    segments: int = DEFAULT_SEGMENTS
    top_k: int = 5
    tuned_k: int = 6
    max_marks: int = DEFAULT_MAX_MARKS
    thresholds: Thresholds = field(default_factory=Thresholds)

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "thresholds"}
        out.update({f"{f.name}_trials" if f.name != "precincts" else "precincts": getattr(self.thresholds, f.name)
                    for f in fields(self.thresholds)})
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f.name for f in fields(cls)} - {"thresholds"}
        kw = {k: int(v) for k, v in data.items() if k in known}
        th = {}
        for f in fields(Thresholds):
            key = "precincts" if f.name == "precincts" else f"{f.name}_trials"
            if data.get(key) is not None:
                th[f.name] = int(data[key])
        unknown = set(data) - known - {"precincts"} - {f"{f.name}_trials" for f in fields(Thresholds)}
        if unknown:
            raise KeyError(f"unknown configuration key(s): {sorted(unknown)}")
        return cls(thresholds=Thresholds(**th), **kw)


@dataclass
class Report:
    """Everything computed for one precinct."""

    precinct_id: str
    n: int
    c: int
    invalid_count: int
    config: dict
    candidates: list[CandidateStats]
    consolidated: CandidateStats
    tuned: CandidateStats
    summary: PrecinctSummary
    leaders: list[str] = field(default_factory=list)
    tuned_leaders: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def analyze_transcript(transcript: Transcript, config: Config | None = None) -> Report:
    config = config or Config()
    if transcript.n == 0:
        raise InsufficientDataError(f"precinct {transcript.precinct_id}: transcript has no valid ballots")
    th = config.thresholds.resolve(transcript.c)
    segments = config.segments if transcript.n >= config.segments else None
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RankingTieWarning)
        warnings.simplefilter("always", SparseSegmentWarning)
        seqs = [candidate_flags(transcript, label) for label in transcript.candidates]
        cons_seq = consolidated_flags(transcript, config.top_k)
        tuned_seq = tuned_flags(transcript, config.tuned_k)
        tildes = run_count_alphas(seqs + [cons_seq, tuned_seq])
        rows = [
            candidate_stats(seq, runs_trials=th.runs, count_trials=th.count,
                            segments=segments, alpha_tilde=tilde)
            for seq, tilde in zip(seqs, tildes)
        ]
        consolidated = candidate_stats(cons_seq, runs_trials=th.group_runs, count_trials=th.group_count,
                                       segments=segments, alpha_tilde=tildes[-2])
        tuned = candidate_stats(tuned_seq, runs_trials=th.group_runs, count_trials=th.group_count,
                                segments=segments, alpha_tilde=tildes[-1])
    seen = set()
    for w in caught:
        text = str(w.message)
        if text not in seen:
            seen.add(text)
            notes.append(text)
    if segments is None:
        notes.append(f"stationarity test skipped: {transcript.n} ballots < {config.segments} segments")
    if transcript.invalid_count:
        notes.append(f"{transcript.invalid_count} invalid ballot(s) excluded")
    ranking = rank_candidates(transcript)
    top = [label for label, _ in ranking[: config.top_k]]
    if transcript.official_votes:
        official = rank_candidates(transcript, transcript.official_votes)
        official_top = [label for label, _ in official[: config.top_k]]
        if set(official_top) != set(top):
            notes.append(
                "top-{} differs between transcript ({}) and official returns ({})".format(
                    config.top_k, ", ".join(top), ", ".join(official_top))
            )
    summary = precinct_summary(transcript, rows, summary_trials=th.summary)
    return Report(
        precinct_id=str(transcript.precinct_id),
        n=transcript.n,
        c=transcript.c,
        invalid_count=transcript.invalid_count,
        config=config.as_dict(),
        candidates=rows,
        consolidated=consolidated,
        tuned=tuned,
        summary=summary,
        leaders=top,
        tuned_leaders=[label for label, _ in ranking[: config.tuned_k]],
        warnings=notes,
    )

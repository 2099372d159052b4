"""Transcripts of vote counting and their binary flag projections.

A transcript is the ordered list of valid ballots as they were announced at
the tally. Every analysis in the package works on a *flag sequence*: one bit
per ballot saying whether the ballot satisfies some rule (marks a candidate,
marks all precinct leaders, ...).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, InsufficientDataError, RosterError

DEFAULT_MAX_MARKS = 5


class RankingTieWarning(UserWarning):
    """Two candidates with equal votes sit on either side of a top-K cut."""


def validity_filter(mark_count: int, max_marks: int = DEFAULT_MAX_MARKS) -> bool:
    """True iff a ballot with ``mark_count`` marks is valid (1..max_marks)."""
    if max_marks < 1:
        raise DomainError("max_marks must be positive")
    if mark_count < 0:
        raise DomainError("mark_count must be nonnegative")
    return 1 <= mark_count <= max_marks


@dataclass(frozen=True)
class Transcript:
    """Valid ballots of one precinct in announcement order.

    ``invalid_count`` records ballots dropped at ingest; they never enter
    ``ballots``. ``official_votes`` optionally holds certified per-candidate
    totals so that a ranking disagreement can be reported.
    """

    precinct_id: str
    candidates: tuple[str, ...]
    ballots: tuple[frozenset, ...]
    max_marks: int = DEFAULT_MAX_MARKS
    invalid_count: int = 0
    metadata: Mapping[str, str] = field(default_factory=dict)
    official_votes: Mapping[str, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "ballots", tuple(frozenset(b) for b in self.ballots))
        if len(set(self.candidates)) != len(self.candidates):
            raise DomainError("duplicate candidate labels in roster")
        roster = set(self.candidates)
        for k, marks in enumerate(self.ballots):
            extra = marks - roster
            if extra:
                raise RosterError(f"ballot {k + 1} marks unknown candidate(s) {sorted(extra)}")
            if not validity_filter(len(marks), self.max_marks):
                raise DomainError(
                    f"ballot {k + 1} has {len(marks)} marks; valid ballots carry 1..{self.max_marks}"
                )

    @property
    def n(self) -> int:
        return len(self.ballots)

    @property
    def c(self) -> int:
        return len(self.candidates)

    def votes(self) -> dict[str, int]:
        counts = dict.fromkeys(self.candidates, 0)
        for marks in self.ballots:
            for label in marks:
                counts[label] += 1
        return counts

    def with_ballots(self, ballots: Iterable[Iterable[str]]) -> "Transcript":
        """Copy of this transcript with a different ballot list."""
        return Transcript(
            precinct_id=self.precinct_id,
            candidates=self.candidates,
            ballots=tuple(frozenset(b) for b in ballots),
            max_marks=self.max_marks,
            invalid_count=self.invalid_count,
            metadata=dict(self.metadata),
            official_votes=self.official_votes,
        )


class FlagSequence:
    """Immutable binary sequence with its label.

    ``flags`` is a read-only ``numpy.int8`` array of zeros and ones.
    """

    __slots__ = ("flags", "label")

    def __init__(self, flags, label: str = ""):
        arr = np.array(flags, dtype=np.int8).ravel()
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise DomainError("flags must be 0 or 1")
        arr.setflags(write=False)
        self.flags = arr
        self.label = label

    @property
    def n(self) -> int:
        return int(self.flags.size)

    @property
    def r1(self) -> int:
        return int(self.flags.sum())

    @property
    def r0(self) -> int:
        return self.n - self.r1

    def count(self, state: int) -> int:
        return self.r1 if state == 1 else self.r0

    def fraction(self, state: int) -> float:
        """Plug-in probability of ``state``: r_state / n."""
        if self.n == 0:
            raise InsufficientDataError("empty flag sequence")
        return self.count(state) / self.n

    def complement(self) -> "FlagSequence":
        return FlagSequence(1 - self.flags, f"not({self.label})")

    def reversed(self) -> "FlagSequence":
        return FlagSequence(self.flags[::-1], self.label)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, FlagSequence):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.flags, other.flags)

    def __hash__(self):
        return hash((self.label, self.flags.tobytes()))

    def __repr__(self):
        return f"FlagSequence(n={self.n}, r1={self.r1}, label={self.label!r})"


@dataclass(frozen=True)
class RunStats:
    """Longest runs of zeros (``s0``) and ones (``s1``) and the run count ``m``."""

    s0: int
    s1: int
    m: int

    def longest(self, state: int) -> int:
        return self.s1 if state == 1 else self.s0


def runs(seq: FlagSequence) -> list[tuple[int, int, int]]:
    """Maximal constant runs as ``(state, start, length)`` triples."""
    f = seq.flags
    if f.size == 0:
        return []
    cuts = np.flatnonzero(f[1:] != f[:-1]) + 1
    starts = np.concatenate(([0], cuts))
    ends = np.concatenate((cuts, [f.size]))
    return [(int(f[a]), int(a), int(b - a)) for a, b in zip(starts, ends)]


def run_stats(seq: FlagSequence) -> RunStats:
    if seq.n == 0:
        raise InsufficientDataError("run statistics need at least one flag")
    longest = {0: 0, 1: 0}
    all_runs = runs(seq)
    for state, _, length in all_runs:
        if length > longest[state]:
            longest[state] = length
    return RunStats(s0=longest[0], s1=longest[1], m=len(all_runs))


def candidate_flags(transcript: Transcript, candidate: str) -> FlagSequence:
    if candidate not in transcript.candidates:
        raise RosterError(f"{candidate!r} is not on the roster of precinct {transcript.precinct_id}")
    flags = [1 if candidate in marks else 0 for marks in transcript.ballots]
    return FlagSequence(flags, candidate)


def rank_candidates(transcript: Transcript, votes: Mapping[str, int] | None = None) -> list[tuple[str, int]]:
    """Candidates by vote count, descending; equal counts keep roster order.

    ``votes`` overrides the transcript's own counts (used for certified
    returns).
    """
    if transcript.n == 0 and votes is None:
        raise InsufficientDataError("cannot rank candidates of an empty transcript")
    counts = transcript.votes() if votes is None else votes
    order = {label: k for k, label in enumerate(transcript.candidates)}
    return sorted(((label, int(counts[label])) for label in transcript.candidates),
                  key=lambda item: (-item[1], order[item[0]]))


def tie_at_cut(ranking: Sequence[tuple[str, int]], k: int) -> bool:
    """True when the k-th and (k+1)-th ranked candidates have equal votes."""
    return 0 < k < len(ranking) and ranking[k - 1][1] == ranking[k][1]


def leaders(transcript: Transcript, k: int) -> tuple[str, ...]:
    """Labels of the ``k`` leading candidates; warns on a tie at the cut."""
    if not 1 <= k <= transcript.c:
        raise DomainError(f"top_k={k} must lie in 1..{transcript.c}")
    ranking = rank_candidates(transcript)
    if tie_at_cut(ranking, k):
        warnings.warn(
            f"precinct {transcript.precinct_id}: tie at the top-{k} cut "
            f"({ranking[k - 1][0]} and {ranking[k][0]} both have {ranking[k][1]} votes); "
            "roster order decides",
            RankingTieWarning,
            stacklevel=3,
        )
    return tuple(label for label, _ in ranking[:k])


def consolidated_flags(transcript: Transcript, top_k: int = 5) -> FlagSequence:
    """f = 1 iff the ballot marks every one of the ``top_k`` leaders."""
    top = frozenset(leaders(transcript, top_k))
    flags = [1 if top <= marks else 0 for marks in transcript.ballots]
    return FlagSequence(flags, f"all of top-{top_k}: " + ", ".join(leaders_in_order(transcript, top)))


def tuned_flags(transcript: Transcript, top_k: int = 6) -> FlagSequence:
    """f = 1 iff the ballot's marks are nonempty and all among the ``top_k`` leaders."""
    top = frozenset(leaders(transcript, top_k))
    flags = [1 if marks and marks <= top else 0 for marks in transcript.ballots]
    return FlagSequence(flags, f"only top-{top_k}: " + ", ".join(leaders_in_order(transcript, top)))


def leaders_in_order(transcript: Transcript, labels) -> list[str]:
    return [c for c in transcript.candidates if c in labels]

"""Synthetic transcripts: honest IID ballots, stuffed batches and partial mixing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ScenarioError
from .flagseq import DEFAULT_MAX_MARKS, Transcript, validity_filter

_BLOCK = 4096
_MIN_VALID_PROBABILITY = 1e-6


@dataclass(frozen=True)
class Slate:
    """With probability ``probability`` a ballot marks exactly ``members``."""

    members: tuple[str, ...]
    probability: float


@dataclass(frozen=True)
class FraudScenario:
    """Honest null model plus an optional stuffed batch and mixing.

    ``batch_position`` of ``None`` puts the batch at a seed-dependent uniform
    position. ``mixing_chunk`` of 0 leaves the order alone.
    """

    candidates: tuple[str, ...]
    probabilities: tuple[float, ...]
    n_honest: int
    batch_pattern: tuple[str, ...] = ()
    batch_size: int = 0
    batch_position: int | None = None
    mixing_chunk: int = 0
    max_marks: int = DEFAULT_MAX_MARKS
    slates: tuple[Slate, ...] = ()
    precinct_id: str = "synthetic"
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.candidates) != len(self.probabilities):
            raise ScenarioError("one probability per candidate is required")
        if len(set(self.candidates)) != len(self.candidates):
            raise ScenarioError("duplicate candidate labels")
        if any(not 0.0 <= p <= 1.0 for p in self.probabilities):
            raise ScenarioError("mark probabilities must lie in [0, 1]")
        if self.n_honest < 0 or self.batch_size < 0:
            raise ScenarioError("ballot counts must be nonnegative")
        if self.mixing_chunk < 0:
            raise ScenarioError("mixing chunk must be nonnegative (0 disables mixing)")
        if self.batch_size and not self.batch_pattern:
            raise ScenarioError("a nonempty batch needs a mark pattern")
        unknown = set(self.batch_pattern) - set(self.candidates)
        for slate in self.slates:
            unknown |= set(slate.members) - set(self.candidates)
            if not 0.0 <= slate.probability <= 1.0:
                raise ScenarioError("slate probability must lie in [0, 1]")
            if not validity_filter(len(slate.members), self.max_marks):
                raise ScenarioError(f"slate {slate.members} is not a valid ballot")
        if unknown:
            raise ScenarioError(f"unknown candidate(s) {sorted(unknown)}")
        if sum(s.probability for s in self.slates) > 1.0:
            raise ScenarioError("slate probabilities sum above 1")


def _valid_probability(probs, max_marks):
    # Poisson-binomial distribution of the mark count
    dist = np.zeros(len(probs) + 1)
    dist[0] = 1.0
    for p in probs:
        dist[1:] = dist[1:] * (1 - p) + dist[:-1] * p
        dist[0] *= 1 - p
    return float(dist[1 : max_marks + 1].sum())


def gen_iid_transcript(scenario: FraudScenario, seed: int | None = None) -> Transcript:
    """Honest transcript of ``n_honest`` IID ballots, conditioned on validity.

    Invalid draws (no marks or too many) are discarded and redrawn.
    """
    rng = np.random.default_rng(np.uint64(scenario.seed if seed is None else seed))
    probs = np.asarray(scenario.probabilities, dtype=float)
    slate_mass = sum(s.probability for s in scenario.slates)
    if scenario.n_honest and slate_mass < 1.0:
        if _valid_probability(probs, scenario.max_marks) < _MIN_VALID_PROBABILITY:
            raise ScenarioError("mark probabilities almost never give a valid ballot")
    labels = scenario.candidates
    slate_edges = np.cumsum([s.probability for s in scenario.slates])
    ballots: list[frozenset] = []
    while len(ballots) < scenario.n_honest:
        pick = rng.random(_BLOCK)
        marks = rng.random((_BLOCK, len(labels))) < probs
        counts = marks.sum(axis=1)
        for row in range(_BLOCK):
            slate_idx = int(np.searchsorted(slate_edges, pick[row], side="right"))
            if slate_idx < len(scenario.slates):
                ballots.append(frozenset(scenario.slates[slate_idx].members))
            elif 1 <= counts[row] <= scenario.max_marks:
                ballots.append(frozenset(labels[j] for j in np.flatnonzero(marks[row])))
            if len(ballots) == scenario.n_honest:
                break
    return Transcript(
        precinct_id=scenario.precinct_id,
        candidates=labels,
        ballots=tuple(ballots),
        max_marks=scenario.max_marks,
    )


def inject_batch(transcript: Transcript, pattern, size: int, position: int) -> Transcript:
    """Insert ``size`` identical ballots marking ``pattern`` before ballot ``position``."""
    pattern = frozenset(pattern)
    if not validity_filter(len(pattern), transcript.max_marks):
        raise ScenarioError(f"batch pattern with {len(pattern)} marks is not a valid ballot")
    if not pattern <= set(transcript.candidates):
        raise ScenarioError("batch pattern marks candidates outside the roster")
    if not 0 <= position <= transcript.n:
        raise ScenarioError(f"position {position} outside 0..{transcript.n}")
    if size < 0:
        raise ScenarioError("batch size must be nonnegative")
    if size == 0:
        return transcript
    ballots = list(transcript.ballots)
    ballots[position:position] = [pattern] * size
    return transcript.with_ballots(ballots)


def partial_mix(transcript: Transcript, chunk: int, seed: int) -> Transcript:
    """Shuffle the order of contiguous ``chunk``-ballot blocks; blocks stay intact."""
    if chunk < 1:
        raise ScenarioError("chunk size must be at least 1")
    n = transcript.n
    if chunk >= n:
        return transcript
    blocks = [transcript.ballots[i : i + chunk] for i in range(0, n, chunk)]
    order = np.random.default_rng(np.uint64(seed)).permutation(len(blocks))
    return transcript.with_ballots(b for k in order for b in blocks[k])


def realise(scenario: FraudScenario, seed: int | None = None) -> Transcript:
    """Honest ballots, then the batch, then mixing, all driven by one seed."""
    seed = scenario.seed if seed is None else seed
    seeds = np.random.SeedSequence(seed).generate_state(3, dtype=np.uint64)
    transcript = gen_iid_transcript(scenario, int(seeds[0]))
    if scenario.batch_size:
        if scenario.batch_position is None:
            pos = int(np.random.default_rng(seeds[1]).integers(0, transcript.n + 1))
        else:
            pos = scenario.batch_position
        transcript = inject_batch(transcript, scenario.batch_pattern, scenario.batch_size, pos)
    if scenario.mixing_chunk:
        transcript = partial_mix(transcript, scenario.mixing_chunk, int(seeds[2]))
    return transcript

"""Exact run-statistics tests for ballot stuffing in vote-counting transcripts."""

from .aggregate import (
    CandidateStats,
    PrecinctSummary,
    Thresholds,
    candidate_stats,
    min_significances,
    overall_alpha_prime,
    overall_alpha_tilde_prime,
    precinct_summary,
    suspicion_flags,
)
from .analysis import Config, Report, analyze_transcript
from .flagseq import (
    FlagSequence,
    RunStats,
    Transcript,
    candidate_flags,
    consolidated_flags,
    rank_candidates,
    run_stats,
    tuned_flags,
    validity_filter,
)
from .runstats import (
    BernoulliModel,
    Significance,
    exact_longest_run_alpha,
    exact_run_count_alpha,
    gaussian_run_count_approx,
    power,
    quick_bound_alpha,
    run_count_moments,
)
from .stationarity import chi2_upper_tail, segment_counts, stationarity_alpha

__version__ = "0.1.0"

"""Brute-force and Monte Carlo reference values for the run statistics.

These share no code with the recurrences in :mod:`ballotruns.runstats`.
Enumeration walks all 2^n strings and weights each by p^ones q^zeros; Monte
Carlo draws IID sequences from numpy's PCG64 generator
(``numpy.random.default_rng(seed)``), whose output stream is fixed per seed on
every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, OutOfRangeError

MAX_ENUMERATION = 20
MIN_TRIALS = 1_000
MIN_RESOLVABLE = 1e-4


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    stderr: float
    trials: int

    @property
    def exhaustive(self) -> bool:
        return self.stderr == 0.0


@lru_cache(maxsize=MAX_ENUMERATION + 1)
def _all_strings(n):
    """Per string of length n: (number of ones, longest run of ones, number of runs)."""
    codes = np.arange(1 << n, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(np.int8)
    ones = bits.sum(axis=1)
    longest = np.zeros(codes.size, dtype=np.int64)
    current = np.zeros(codes.size, dtype=np.int64)
    for col in range(n):
        current = np.where(bits[:, col] == 1, current + 1, 0)
        np.maximum(longest, current, out=longest)
    n_runs = 1 + (bits[:, 1:] != bits[:, :-1]).sum(axis=1) if n > 1 else np.ones(codes.size, dtype=np.int64)
    return ones, longest, n_runs


def _weighted_sum(n, p, mask):
    # group qualifying strings by their number of ones; counts are exact integers
    ones, _, _ = _all_strings(n)
    counts = np.bincount(ones[mask], minlength=n + 1)
    q = 1.0 - p
    return math.fsum(int(counts[k]) * p ** k * q ** (n - k) for k in range(n + 1) if counts[k])


def _check_size(n, p):
    if not 1 <= n <= MAX_ENUMERATION:
        raise DomainError(f"enumeration supports 1 <= n <= {MAX_ENUMERATION}, got {n}")
    if not 0.0 <= p <= 1.0:
        raise DomainError("p must lie in [0, 1]")


def enumerate_longest_run_tail(n: int, p: float, s: int) -> OracleEstimate:
    """P(longest run of ones >= s) by summing over all 2^n strings."""
    _check_size(n, p)
    if s <= 0:
        return OracleEstimate(1.0, 0.0, 1 << n)
    _, longest, _ = _all_strings(n)
    return OracleEstimate(_weighted_sum(n, p, longest >= s), 0.0, 1 << n)


def enumerate_run_count_cdf(n: int, p: float, m: int) -> OracleEstimate:
    """P(number of runs <= m) by summing over all 2^n strings."""
    _check_size(n, p)
    _, _, n_runs = _all_strings(n)
    return OracleEstimate(_weighted_sum(n, p, n_runs <= m), 0.0, 1 << n)


def _sample_stats(rng, n, p, trials, chunk=50_000):
    longest = np.empty(trials, dtype=np.int64)
    n_runs = np.empty(trials, dtype=np.int64)
    for lo in range(0, trials, chunk):
        hi = min(trials, lo + chunk)
        bits = rng.random((hi - lo, n)) < p
        cur = np.zeros(hi - lo, dtype=np.int64)
        best = np.zeros(hi - lo, dtype=np.int64)
        for col in range(n):
            cur = np.where(bits[:, col], cur + 1, 0)
            np.maximum(best, cur, out=best)
        longest[lo:hi] = best
        n_runs[lo:hi] = 1 + (bits[:, 1:] != bits[:, :-1]).sum(axis=1)
    return longest, n_runs


def monte_carlo_tail(n: int, p: float, *, s: int | None = None, m: int | None = None,
                     trials: int = 100_000, seed: int = 0) -> OracleEstimate:
    """Monte Carlo estimate of P(longest >= s) or P(runs <= m).

    Exactly one of ``s`` and ``m`` must be given. Targets whose probability is
    screened (by the closed-form bound / normal approximation) to lie below
    1e-4 raise :class:`OutOfRangeError`: a feasible number of trials cannot
    resolve them.
    """
    if (s is None) == (m is None):
        raise DomainError("give exactly one of s (longest run) or m (run count)")
    if trials < MIN_TRIALS:
        raise DomainError(f"need at least {MIN_TRIALS} trials")
    if n < 2 or not 0.0 <= p <= 1.0:
        raise DomainError("need n >= 2 and p in [0, 1]")
    if _screen(n, p, s, m) < MIN_RESOLVABLE:
        raise OutOfRangeError("target tail is expected below 1e-4; Monte Carlo cannot certify it")
    rng = np.random.default_rng(np.uint64(seed))
    longest, n_runs = _sample_stats(rng, n, p, trials)
    hits = (longest >= s) if s is not None else (n_runs <= m)
    v = float(hits.mean())
    return OracleEstimate(v, math.sqrt(v * (1.0 - v) / trials), trials)


def _screen(n, p, s, m):
    """Rough size of the target probability, erring high."""
    q = 1.0 - p
    if s is not None:
        if s <= 0:
            return 1.0
        return min(1.0, (1.0 + q * max(n - s, 0)) * p ** s)
    theta = 2.0 * p * q
    mean = 1.0 + (n - 1) * theta
    var = (2 * n - 3) * theta - (3 * n - 5) * theta * theta
    if var <= 0.0:
        return 1.0
    # the normal approximation may overshoot tiny tails by orders of
    # magnitude but rarely undershoots; scale by 10 for headroom
    z = (m + 0.5 - mean) / math.sqrt(var)
    return min(1.0, 10.0 * 0.5 * math.erfc(-z / math.sqrt(2.0)))

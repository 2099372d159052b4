"""Chi-squared check that the vote rate stays constant along the counting order.

The flag sequence is cut into ``l`` equal segments; a flag that straddles a
segment boundary is shared between the two segments in proportion to the
overlap of its unit interval. Segment counts of ones are compared with their
stationary expectation by a chi-squared statistic with ``l - 1`` degrees of
freedom.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError, DomainError, NumericError
from .flagseq import FlagSequence
from .runstats import Significance

DEFAULT_SEGMENTS = 12
MIN_FLAGS_PER_SEGMENT = 24

_MAX_ITER = 10_000
_EPS = 1e-12
_TINY = 1e-300


class SparseSegmentWarning(UserWarning):
    """Segments are too short for the chi-squared approximation to be trusted."""


@dataclass(frozen=True)
class SegmentCounts:
    l: int
    k: tuple[float, ...]
    mu: float
    sigma2: float


def segment_counts(seq: FlagSequence, l: int) -> SegmentCounts:
    """Fractional counts of ones in ``l`` equal segments.

    Segment i covers ((i-1)n/l, i n/l]; flag j covers (j-1, j].
    """
    n = seq.n
    if l < 2:
        raise DomainError("need at least 2 segments")
    if l > n:
        raise DomainError(f"cannot split {n} flags into {l} segments")
    flags = seq.flags.astype(float)
    cum = np.concatenate(([0.0], np.cumsum(flags)))

    def ones_up_to(i):
        # ones in (0, i*n/l], boundary position kept as whole + num/l
        whole, num = divmod(i * n, l)
        partial = flags[whole] * num / l if num else 0.0
        return cum[whole] + partial

    edges = [ones_up_to(i) for i in range(l + 1)]
    k = tuple(float(edges[i + 1] - edges[i]) for i in range(l))
    r0, r1 = seq.r0, seq.r1
    return SegmentCounts(l=l, k=k, mu=r1 / l, sigma2=r0 * r1 / (n * l))


def chi2_statistic(counts: SegmentCounts) -> float:
    """Sum over segments of (k_i - mu)^2 / sigma^2."""
    if counts.sigma2 <= 0.0:
        raise DegenerateModelError("constant flag sequence: the vote flow carries no rate information")
    dev = np.asarray(counts.k) - counts.mu
    return float(math.fsum(dev * dev) / counts.sigma2)


def _lower_series(a, x):
    # regularized P(a, x) by its power series; fine for x < a + 1
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NumericError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _upper_fraction(a, x):
    # regularized Q(a, x) by the modified Lentz continued fraction; x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise NumericError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def regularized_upper_gamma(a: float, x: float) -> float:
    """Q(a, x) = Γ(a, x) / Γ(a)."""
    if a <= 0:
        raise DomainError("shape must be positive")
    if x < 0:
        raise DomainError("x must be nonnegative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_series(a, x)
    return _upper_fraction(a, x)


def chi2_upper_tail(x: float, dof: int) -> float:
    """P(X >= x) for X ~ chi-squared with ``dof`` degrees of freedom."""
    if dof < 1:
        raise DomainError("degrees of freedom must be positive")
    if x < 0:
        raise DomainError("chi-squared statistic must be nonnegative")
    return regularized_upper_gamma(dof / 2.0, x / 2.0)


def stationarity_alpha(seq: FlagSequence, l: int = DEFAULT_SEGMENTS) -> Significance:
    """Significance that segment-to-segment variation of the vote rate is random.

    A constant sequence carries no information and returns 1.
    """
    if seq.n < l:
        raise DomainError(f"need at least {l} flags for {l} segments, got {seq.n}")
    if seq.r0 == 0 or seq.r1 == 0:
        return Significance(1.0)
    if seq.n / l < MIN_FLAGS_PER_SEGMENT:
        warnings.warn(
            f"{seq.n / l:.1f} flags per segment; the chi-squared approximation wants "
            f"at least {MIN_FLAGS_PER_SEGMENT}",
            SparseSegmentWarning,
            stacklevel=2,
        )
    stat = chi2_statistic(segment_counts(seq, l))
    return Significance(min(1.0, chi2_upper_tail(stat, l - 1)))

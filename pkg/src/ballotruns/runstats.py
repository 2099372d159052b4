"""Exact and approximate significances of run statistics under an IID Bernoulli model.

Two statistics of a binary sequence are tested:

* the longest run of the tracked flag state, whose upper tail
  ``P(longest >= s)`` is small when a batch of identical ballots was stuffed;
* the total number of runs, whose lower tail ``P(runs <= m)`` is small when
  stuffed batches survive partial mixing as fragments.

Both tails are computed by forward recurrences that add one flag at a time.
All terms are nonnegative and tails are summed directly from the
probabilities of the qualifying outcomes, so values down to ~1e-300 keep full
relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError, DomainError

__all__ = [
    "BernoulliModel",
    "Significance",
    "power",
    "exact_longest_run_alpha",
    "longest_run_distribution",
    "quick_bound_alpha",
    "exact_run_count_alpha",
    "run_count_distribution",
    "exact_run_count_alphas",
    "iter_run_count_distributions",
    "run_count_moments",
    "gaussian_run_count_approx",
]


@dataclass(frozen=True)
class BernoulliModel:
    """``n`` independent flags, each equal to the tracked state with probability ``p``."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"sequence length must be positive, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"probability must lie in [0, 1], got {self.p}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @classmethod
    def fit(cls, seq, state: int = 1) -> "BernoulliModel":
        """Plug-in model for ``state`` of a flag sequence: p = r_state / n."""
        return cls(seq.n, seq.count(state) / seq.n)


def power(alpha: float) -> float:
    """-log10(alpha); +inf for alpha == 0."""
    if not 0.0 <= alpha <= 1.0 or math.isnan(alpha):
        raise DomainError(f"significance must lie in [0, 1], got {alpha}")
    if alpha == 0.0:
        return math.inf
    if alpha == 1.0:
        return 0.0
    return -math.log10(alpha)


@dataclass(frozen=True)
class Significance:
    """A probability under the honest null and its power -lg(alpha)."""

    alpha: float

    def __post_init__(self):
        power(self.alpha)  # domain check

    @property
    def power(self) -> float:
        return power(self.alpha)

    def __float__(self):
        return float(self.alpha)


# -- longest run ---------------------------------------------------------------

def _longest_run_tail(n, p, s):
    """P(longest run of the tracked state >= s) for ``n`` flags.

    First-passage form of the absorbing-state recurrence: a run of length s
    appears for the first time ending at flag k with probability p^s (k = s)
    or q * p^s * P(no such run in the first k-s-1 flags) (k > s). The
    absorbed mass only ever grows by nonnegative increments.

    Works for any numeric type supporting + - * (floats, mpmath.mpf).
    """
    if s == 0:
        return p ** 0
    q = 1 - p
    ps = p ** s
    step = q * ps
    tail = [p * 0] * (n + 1)  # tail[k] = P(run >= s within the first k flags)
    if s <= n:
        tail[s] = ps
    for k in range(s + 1, n + 1):
        tail[k] = tail[k - 1] + step * (1 - tail[k - s - 1])
    return tail[n]


def longest_run_distribution(model: BernoulliModel) -> np.ndarray:
    """Distribution ``w[i]`` = P(longest run of the tracked state == i), i = 0..n.

    Direct transcription of the three-index recurrence over
    ``u[i, j]`` = P(longest == i and the last j flags are the tracked state).
    O(n^3) work; use :func:`exact_longest_run_alpha` for single tails.
    """
    n, p, q = model.n, model.p, model.q
    size = n + 2  # index n+1 holds the boundary zeros
    u = np.zeros((size, size))
    u[0, 0] = 1.0
    lower = np.tril(np.ones((size, size), dtype=bool))
    for step in range(n):
        top = step + 2  # only i, j <= step + 1 can be nonzero after this step
        cur = u[:top, :top]
        w = cur.sum(axis=1)
        new = np.zeros_like(cur)
        new[:, 1:] = p * cur[:, :-1]                    # 0 < j <= i: extend trailing run
        idx = np.arange(1, top)
        new[idx, idx] += p * cur[idx - 1, idx - 1]      # j == i: the run becomes the longest
        new[~lower[:top, :top]] = 0.0                   # j > i is impossible
        new[:, 0] = q * w                               # opposite flag resets the trailing run
        u[:top, :top] = new
    w = u[: n + 1, : n + 1].sum(axis=1)
    return w


def exact_longest_run_alpha(model: BernoulliModel, s: int, method: str = "fast") -> Significance:
    """Significance of a longest run of at least ``s`` tracked flags.

    ``method="fast"`` uses the O(n) first-passage recurrence; ``"full"`` sums
    the upper tail of :func:`longest_run_distribution`. The two agree to
    rounding error.
    """
    if not isinstance(s, (int, np.integer)) or not 0 <= s <= model.n:
        raise DomainError(f"run length must be an integer in 0..{model.n}, got {s!r}")
    if s == 0:
        return Significance(1.0)
    if method == "fast":
        alpha = _longest_run_tail(model.n, model.p, int(s))
    elif method == "full":
        w = longest_run_distribution(model)
        alpha = math.fsum(w[s:][::-1])
    else:
        raise DomainError(f"unknown method {method!r}")
    return Significance(min(1.0, max(0.0, float(alpha))))


def quick_bound_alpha(model: BernoulliModel, s: int) -> float:
    """Upper bound [1 + q(n - s)] p^s counting every possible starting flag once."""
    if not 1 <= s <= model.n:
        raise DomainError(f"run length must lie in 1..{model.n}, got {s}")
    return (1.0 + model.q * (model.n - s)) * model.p ** s


# -- number of runs ------------------------------------------------------------

def iter_run_count_distributions(p: float, n_max: int, max_runs: int | None = None):
    """Yield ``(k, v)`` for k = 1..n_max with ``v[i]`` = P(i runs among k flags).

    ``a[i]`` / ``b[i]``: i runs and the last flag is the tracked / opposite
    state. A flag equal to the last one keeps the run count, a different one
    adds a run. Counts above ``max_runs`` never feed back into lower ones, so
    truncating the arrays there is exact.
    """
    q = 1.0 - p
    width = (n_max if max_runs is None else max_runs) + 1
    a = np.zeros(width)
    b = np.zeros(width)
    a[1] = p
    b[1] = q
    yield 1, a + b
    for k in range(2, n_max + 1):
        a_next = p * (a[1:] + b[:-1])
        b[1:] = q * (b[1:] + a[:-1])
        a[1:] = a_next
        yield k, a + b


def _run_count_cdfs(n, ps, ms):
    """P(runs <= m) for several (p, m) pairs sharing the length ``n``.

    Rows of the state arrays are independent sequences; the recurrence is the
    same as in :func:`iter_run_count_distributions`.
    """
    ps = np.asarray(ps, dtype=float)[:, None]
    qs = 1.0 - ps
    width = int(max(ms)) + 1
    a = np.zeros((ps.shape[0], width))
    b = np.zeros_like(a)
    a[:, 1] = ps[:, 0]
    b[:, 1] = qs[:, 0]
    for _ in range(n - 1):
        a_next = ps * (a[:, 1:] + b[:, :-1])
        b[:, 1:] = qs * (b[:, 1:] + a[:, :-1])
        a[:, 1:] = a_next
    v = a + b
    # smallest-index terms first
    return [math.fsum(v[row, 1 : m + 1]) for row, m in enumerate(ms)]


def run_count_distribution(model: BernoulliModel) -> np.ndarray:
    """``v[i]`` = P(exactly i runs among n flags), i = 0..n (v[0] = 0)."""
    v = None
    for _, v in iter_run_count_distributions(model.p, model.n):
        pass
    return v


def _check_run_count(n, m):
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= n:
        raise DomainError(f"run count must be an integer in 1..{n}, got {m!r}")


def exact_run_count_alpha(model: BernoulliModel, m: int) -> Significance:
    """Significance of observing at most ``m`` runs: sum of v[1..m]."""
    _check_run_count(model.n, m)
    if m == model.n:
        return Significance(1.0)
    return Significance(min(1.0, _run_count_cdfs(model.n, [model.p], [int(m)])[0]))


def exact_run_count_alphas(n: int, ps, ms) -> list[Significance]:
    """Batched :func:`exact_run_count_alpha` for sequences of a common length."""
    ms = [int(m) for m in ms]
    for m in ms:
        _check_run_count(n, m)
    for p in ps:
        BernoulliModel(n, p)  # domain check
    if not ms:
        return []
    cdfs = _run_count_cdfs(n, ps, ms)
    return [Significance(1.0 if m == n else min(1.0, c)) for m, c in zip(ms, cdfs)]


def run_count_moments(model: BernoulliModel) -> tuple[float, float]:
    """Mean 1 + (n-1)θ and variance (2n-3)θ - (3n-5)θ² of the run count, θ = 2pq."""
    n = model.n
    if n < 2:
        raise DomainError("run-count moments are defined for n >= 2")
    theta = 2.0 * model.p * model.q
    mean = 1.0 + (n - 1) * theta
    var = (2 * n - 3) * theta - (3 * n - 5) * theta * theta
    return mean, max(var, 0.0)


def gaussian_run_count_approx(model: BernoulliModel, m: int) -> float:
    """Normal approximation Φ((m + 1/2 - μ)/σ) of P(runs <= m).

    Advisory only: it can underestimate the exact value.
    """
    mean, var = run_count_moments(model)
    if var <= 0.0:
        raise DegenerateModelError("run count has zero variance for p in {0, 1}")
    z = (m + 0.5 - mean) / math.sqrt(var)
    return 0.5 * math.erfc(-z / math.sqrt(2.0))

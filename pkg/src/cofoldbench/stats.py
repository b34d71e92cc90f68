"""Aggregation math: best@k, bootstrap, max-confidence selection and significance."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import special

DEFAULT_BOOTSTRAP_ITERS = 1000
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class StructureOutcome:
    """Per-entry success counts under one criterion."""

    entry_id: str
    n: int
    c: int
    confidence_best_success: bool | None = None
    per_pose: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not 0 <= self.c <= self.n:
            raise ValueError(f"{self.entry_id}: c={self.c} outside [0, {self.n}]")


@dataclass(frozen=True)
class AggregateResult:
    metric_name: str
    k: int | None
    mean: float | None
    sem: float | None
    n_structures: int

    def to_dict(self) -> dict:
        return {
            "metric_name": self.metric_name,
            "k": self.k,
            "mean": self.mean,
            "sem": self.sem,
            "n_structures": self.n_structures,
        }


def _check_nck(n: int, c: int, k: int) -> None:
    if not (isinstance(n, (int, np.integer)) and isinstance(c, (int, np.integer)) and isinstance(k, (int, np.integer))):
        raise TypeError("n, c and k must be integers")
    if not 0 <= c <= n:
        raise ValueError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")


def best_at_k_exact(n: int, c: int, k: int) -> Fraction:
    """Probability that a random k-subset of n poses holds at least one of c successes.

    Uses the product form C(n-c, k) / C(n, k) = prod_{i=0}^{k-1} (n-c-i)/(n-i),
    kept as an exact rational.
    """
    _check_nck(n, c, k)
    if n - c < k:
        return Fraction(1)
    num = den = 1
    for i in range(k):
        num *= n - c - i
        den *= n - i
    return 1 - Fraction(num, den)


def best_at_k(n: int, c: int, k: int) -> float:
    """Unbiased best@k estimate as a float (correctly rounded from the exact value)."""
    return float(best_at_k_exact(n, c, k))


def aggregate_exact(outcomes: Sequence[StructureOutcome], k: int) -> Fraction:
    if not outcomes:
        raise ValueError("cannot aggregate an empty outcome list")
    total = sum((best_at_k_exact(o.n, o.c, k) for o in outcomes), Fraction(0))
    return total / len(outcomes)


def aggregate(outcomes: Sequence[StructureOutcome], k: int) -> float:
    """Mean best@k over structures."""
    return float(aggregate_exact(outcomes, k))


def expected_max_at_k(values: Sequence[float], k: int) -> float:
    """Expected maximum of a random k-subset of ``values`` (best@k for a continuous score).

    The j-th smallest of n values (1-based) is the subset maximum with
    probability C(j-1, k-1) / C(n, k).
    """
    v = sorted(float(x) for x in values)
    n = len(v)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    total = math.comb(n, k)
    return math.fsum(v[j - 1] * math.comb(j - 1, k - 1) / total for j in range(k, n + 1))


def select_max_confidence(poses: Sequence, success) -> bool:
    """Success flag of the highest-confidence pose.

    ``poses`` are objects with ``seed``, ``sample`` and ``confidence``;
    ``success`` maps a pose to a bool. Ties go to the earliest (seed, sample).
    """
    if not poses:
        raise ValueError("no poses")
    best = None
    for p in sorted(poses, key=lambda p: (p.seed, p.sample)):
        if p.confidence is None or (isinstance(p.confidence, float) and math.isnan(p.confidence)):
            raise ValueError(f"pose seed={p.seed} sample={p.sample} has no confidence")
        if best is None or p.confidence > best.confidence:
            best = p
    return bool(success(best))


def splitmix64(x: int) -> int:
    """One SplitMix64 output for state ``x`` (the state is advanced by the caller)."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _vec_splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def iteration_key(seed: int, iteration: int) -> int:
    """Sub-seed for one bootstrap iteration, derived only from (seed, iteration)."""
    return splitmix64((splitmix64(seed & _MASK64) ^ (iteration & _MASK64)) & _MASK64)


def resample_indices(seed: int, iteration: int, n: int) -> np.ndarray:
    """Indices drawn with replacement for one iteration.

    Draw i uses the SplitMix64 output of (key + i * golden_gamma) and maps it
    to [0, n) by taking the high 64 bits of ``u * n``.
    """
    key = np.uint64(iteration_key(seed, iteration))
    with np.errstate(over="ignore"):
        states = key + np.arange(n, dtype=np.uint64) * np.uint64(0x9E3779B97F4A7C15)
    u = _vec_splitmix64(states)
    # high word of the 128-bit product u * n, assembled from 32-bit halves
    lo = u & np.uint64(0xFFFFFFFF)
    hi = u >> np.uint64(32)
    nn = np.uint64(n)
    cross = (lo * nn) >> np.uint64(32)
    return ((hi * nn + cross) >> np.uint64(32)).astype(np.int64)


def _resample_means(vals: np.ndarray, seed: int, iterations: range) -> list[float]:
    n = len(vals)
    return [math.fsum(vals[resample_indices(seed, it, n)]) / n for it in iterations]


def bootstrap(values: Sequence[float], iters: int = DEFAULT_BOOTSTRAP_ITERS, seed: int = 0, workers: int = 1) -> tuple[float, float]:
    """Bootstrap mean and standard error over structures.

    Returns (mean of resample means, sample standard deviation of resample
    means). Each iteration depends only on (seed, iteration), so the result
    does not depend on ``workers``.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or len(vals) == 0:
        raise ValueError("bootstrap needs a nonempty 1-d sequence")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if workers <= 1 or iters < 2 * workers:
        means = _resample_means(vals, seed, range(iters))
    else:
        bounds = np.linspace(0, iters, workers + 1).astype(int)
        chunks = [range(bounds[i], bounds[i + 1]) for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda r: _resample_means(vals, seed, r), chunks)
        means = [m for part in parts for m in part]
    mean = math.fsum(means) / iters
    if iters == 1:
        return mean, 0.0
    var = math.fsum((m - mean) ** 2 for m in means) / (iters - 1)
    return mean, math.sqrt(var)


def t_upper_tail(t: float, df: int) -> float:
    """P(T > t) for Student's t with ``df`` degrees of freedom."""
    x = df / (df + t * t)
    tail = 0.5 * float(special.betainc(df / 2.0, 0.5, x))
    return tail if t >= 0 else 1.0 - tail


def paired_one_sided_ttest(a: Sequence[float], b: Sequence[float]) -> float:
    """One-sided paired t-test of mean(a - b) > 0.

    Zero-variance differences give p = 0 when the mean difference is
    positive and p = 1 otherwise.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 1 or len(a) < 2:
        raise ValueError("need at least two paired observations")
    d = a - b
    n = len(d)
    mean = math.fsum(d) / n
    var = math.fsum((x - mean) ** 2 for x in d) / (n - 1)
    if var == 0.0:
        return 0.0 if mean > 0 else 1.0
    t = mean / math.sqrt(var / n)
    return t_upper_tail(t, n - 1)


def bootstrap_difference_pvalue(a: Sequence[float], b: Sequence[float], iters: int = DEFAULT_BOOTSTRAP_ITERS, seed: int = 0) -> float:
    """Fraction of paired resamples whose mean(a - b) is <= 0."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if len(d) == 0:
        raise ValueError("empty input")
    means = _resample_means(d, seed, range(iters))
    return sum(1 for m in means if m <= 0) / iters


def significance_stars(p: float) -> str:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p-value {p} outside [0, 1]")
    if p <= 0.001:
        return "***"
    if p <= 0.01:
        return "**"
    if p <= 0.05:
        return "*"
    return ""

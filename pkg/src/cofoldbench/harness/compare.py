"""Paired significance testing between two methods."""

from __future__ import annotations

from dataclasses import dataclass

from cofoldbench import stats
from cofoldbench.errors import BenchError

from .run import RunResults, entry_scores


class EntryMismatchError(BenchError):
    """The two result sets cover different entries."""


@dataclass(frozen=True)
class Comparison:
    criterion: str
    k: int
    delta_mean: float
    p_value: float
    stars: str
    n_structures: int
    method: str = "ttest"

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "k": self.k,
            "delta_mean": self.delta_mean,
            "p_value": self.p_value,
            "stars": self.stars,
            "n_structures": self.n_structures,
            "test": self.method,
        }


def paired_scores(results_a: RunResults, results_b: RunResults, k: int, criterion: str) -> tuple[list[str], list[float], list[float]]:
    sa = entry_scores(results_a.by_entry, criterion, k)
    sb = entry_scores(results_b.by_entry, criterion, k)
    if set(sa) != set(sb):
        diff = sorted(set(sa) ^ set(sb))
        raise EntryMismatchError(f"entry sets differ: {', '.join(diff)}")
    ids = sorted(sa)
    return ids, [sa[i] for i in ids], [sb[i] for i in ids]


def compare_methods(results_a: RunResults, results_b: RunResults, k: int, criterion: str, method: str = "ttest", iters: int = stats.DEFAULT_BOOTSTRAP_ITERS, seed: int = 0) -> Comparison:
    """Test whether method A beats method B on per-structure best@k scores.

    ``method="ttest"`` uses the one-sided paired t-test; ``"bootstrap"``
    uses the paired bootstrap of the mean difference.
    """
    ids, a, b = paired_scores(results_a, results_b, k, criterion)
    if method == "ttest":
        p = stats.paired_one_sided_ttest(a, b)
    elif method == "bootstrap":
        p = stats.bootstrap_difference_pvalue(a, b, iters, seed)
    else:
        raise ValueError(f"unknown test {method!r}")
    delta = (sum(a) - sum(b)) / len(ids)
    return Comparison(criterion, k, delta, p, stats.significance_stars(p), len(ids), method)

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import oracles
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cofoldbench.stats import (
    DEFAULT_BOOTSTRAP_ITERS,
    AggregateResult,
    StructureOutcome,
    aggregate,
    aggregate_exact,
    best_at_k,
    best_at_k_exact,
    bootstrap,
    bootstrap_difference_pvalue,
    expected_max_at_k,
    iteration_key,
    paired_one_sided_ttest,
    resample_indices,
    select_max_confidence,
    significance_stars,
    splitmix64,
    t_upper_tail,
)

# ----------------------------------------------------------------- best@k


def test_best_at_k_equals_enumeration_for_all_small_cases():
    for (n, c, k), oracle in oracles.best_at_k_table(12).items():
        assert best_at_k_exact(n, c, k) == oracle


def test_best_at_k_spot_values():
    assert oracles.enumerate_best_at_k(20, 1, 5) == Fraction(1, 4)
    assert oracles.enumerate_best_at_k(5, 2, 3) == Fraction(9, 10)
    assert best_at_k(20, 1, 5) == 0.25
    assert best_at_k(5, 2, 3) == 0.9
    assert best_at_k(20, 20, 5) == 1.0
    assert best_at_k(20, 0, 5) == 0.0


def test_best_at_k_rejects_bad_parameters():
    for args in [(5, 6, 1), (5, -1, 1), (5, 2, 0), (5, 2, 6)]:
        with pytest.raises(ValueError):
            best_at_k(*args)
    with pytest.raises(TypeError):
        best_at_k(5, 2.0, 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(1, n))))
def test_best_at_k_monotone_in_k_and_c(args):
    n, c, k = args
    v = best_at_k_exact(n, c, k)
    assert 0 <= v <= 1
    if k < n:
        assert best_at_k_exact(n, c, k + 1) >= v
    if c < n:
        assert best_at_k_exact(n, c + 1, k) >= v
    assert best_at_k_exact(n, c, 1) == Fraction(c, n)


def test_aggregate_examples():
    assert aggregate([StructureOutcome("a", 20, 20), StructureOutcome("b", 20, 0)], 5) == 0.5
    assert aggregate([StructureOutcome("a", 20, 1)], 20) == 1.0
    three = [StructureOutcome(str(c), 5, c) for c in (1, 2, 3)]
    assert aggregate_exact(three, 3) == (Fraction(3, 5) + Fraction(9, 10) + 1) / 3
    assert aggregate(three, 3) == pytest.approx(0.8333333333333334, abs=0)
    with pytest.raises(ValueError):
        aggregate([], 1)
    with pytest.raises(ValueError):
        StructureOutcome("x", 20, 21)


def test_aggregate_result_dict():
    r = AggregateResult("rmsd<2", 5, 0.5, 0.1, 2)
    assert r.to_dict() == {"metric_name": "rmsd<2", "k": 5, "mean": 0.5, "sem": 0.1, "n_structures": 2}


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=7), st.data())
def test_expected_max_matches_subset_enumeration(values, data):
    k = data.draw(st.integers(1, len(values)))
    subsets = list(itertools.combinations(values, k))
    oracle = math.fsum(max(s) for s in subsets) / len(subsets)
    assert expected_max_at_k(values, k) == pytest.approx(oracle, abs=1e-12)


def test_expected_max_binary_values_reduce_to_best_at_k():
    for n, c, k in [(20, 1, 5), (5, 2, 3), (20, 7, 20)]:
        vals = [1.0] * c + [0.0] * (n - c)
        assert expected_max_at_k(vals, k) == pytest.approx(best_at_k(n, c, k), abs=1e-15)


# ------------------------------------------------------ max-confidence pick


@dataclass
class _Pose:
    seed: int
    sample: int
    confidence: float | None
    rmsd: float


def test_select_max_confidence():
    poses = [_Pose(0, 0, 0.3, 5.0), _Pose(0, 1, 0.9, 1.2), _Pose(1, 0, 0.5, 0.4)]
    assert select_max_confidence(poses, lambda p: p.rmsd < 2.0)
    assert not select_max_confidence([_Pose(0, 0, 0.3, 5.0), _Pose(0, 1, 0.9, 3.0)], lambda p: p.rmsd < 2.0)


def test_select_max_confidence_tie_goes_to_earliest_seed_sample():
    poses = [_Pose(1, 0, 0.9, 0.5), _Pose(0, 3, 0.9, 4.0), _Pose(0, 4, 0.2, 0.1)]
    assert not select_max_confidence(poses, lambda p: p.rmsd < 2.0)


def test_select_max_confidence_requires_confidence():
    with pytest.raises(ValueError):
        select_max_confidence([_Pose(0, 0, None, 1.0)], lambda p: True)
    with pytest.raises(ValueError):
        select_max_confidence([_Pose(0, 0, float("nan"), 1.0)], lambda p: True)
    with pytest.raises(ValueError):
        select_max_confidence([], lambda p: True)


# -------------------------------------------------------------- bootstrap

GAMMA = oracles.GAMMA
M64 = oracles.M64
ref_splitmix64 = oracles.splitmix64
ref_bootstrap = oracles.bootstrap


def test_splitmix64_reference_outputs():
    # first outputs of the reference generator seeded with 0 (state advanced by gamma)
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(GAMMA) == 0x6E789E6AA1B965F4
    assert all(splitmix64(x) == ref_splitmix64(x) for x in (1, 2**63, M64, 12345678901234567))


def test_bootstrap_matches_reference_oracle_bit_exactly():
    assert bootstrap([0.0, 1.0], iters=1000, seed=42) == ref_bootstrap([0.0, 1.0], 1000, 42)
    rng = np.random.default_rng(9)
    vals = [float(x) for x in rng.random(37)]
    assert bootstrap(vals, iters=200, seed=7) == ref_bootstrap(vals, 200, 7)
    key = iteration_key(3, 5)
    assert key == ref_splitmix64(ref_splitmix64(3) ^ 5)
    assert resample_indices(3, 5, 13).tolist() == [(ref_splitmix64((key + i * GAMMA) & M64) * 13) >> 64 for i in range(13)]


def test_bootstrap_serial_and_parallel_identical():
    vals = np.random.default_rng(10).random(50)
    serial = bootstrap(vals, iters=1000, seed=1, workers=1)
    for w in (2, 3, 8):
        assert bootstrap(vals, iters=1000, seed=1, workers=w) == serial


def test_bootstrap_constant_and_degenerate_inputs():
    mean, sem = bootstrap([0.7] * 50, seed=3)
    assert mean == pytest.approx(0.7, abs=1e-15) and sem == 0.0
    assert bootstrap([0.2, 0.9], iters=1, seed=0)[1] == 0.0
    assert DEFAULT_BOOTSTRAP_ITERS == 1000
    with pytest.raises(ValueError):
        bootstrap([])
    with pytest.raises(ValueError):
        bootstrap([1.0], iters=0)


def test_bootstrap_sem_close_to_analytic_standard_error():
    vals = np.random.default_rng(11).random(200)
    mean, sem = bootstrap(vals, iters=2000, seed=5)
    assert mean == pytest.approx(vals.mean(), abs=0.01)
    assert sem == pytest.approx(vals.std() / math.sqrt(len(vals)), rel=0.1)


def test_resample_indices_are_in_range_and_roughly_uniform():
    idx = resample_indices(0, 0, 100000)
    assert idx.min() >= 0 and idx.max() < 100000
    counts = np.bincount(resample_indices(1, 2, 70000) % 7, minlength=7)
    assert np.all(np.abs(counts - 10000) < 500)


# ------------------------------------------------------------- t-test


def test_ttest_fixture_matches_numerical_integration():
    oracle = oracles.t_upper_tail(1.0, 3)
    p = paired_one_sided_ttest([1, -1, 1, 1], [0, 0, 0, 0])
    assert abs(p - oracle) < 1e-9
    assert abs(p - 0.1955) <= 0.0005


@pytest.mark.parametrize("t, df", [(0.0, 5), (2.5, 10), (-1.3, 4), (4.0, 1), (0.7, 30)])
def test_t_upper_tail_against_integration(t, df):
    oracle = oracles.t_upper_tail(t, df)
    assert t_upper_tail(t, df) == pytest.approx(oracle, abs=1e-9)


def test_ttest_degenerate_conventions():
    assert paired_one_sided_ttest([1, 0, 1], [1, 0, 1]) == 1.0
    assert paired_one_sided_ttest([1, 1, 1, 1], [0, 0, 0, 0]) == 0.0
    assert paired_one_sided_ttest([0, 0], [1, 1]) == 1.0
    with pytest.raises(ValueError):
        paired_one_sided_ttest([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        paired_one_sided_ttest([1], [0])


def test_bootstrap_difference_pvalue():
    assert bootstrap_difference_pvalue([1, 1, 1], [0, 0, 0]) == 0.0
    assert bootstrap_difference_pvalue([0, 0, 0], [0, 0, 0]) == 1.0
    p = bootstrap_difference_pvalue([1, 0, 1, 1, 0, 1], [0, 0, 0, 1, 1, 0], seed=2)
    assert 0.0 < p < 0.5


@pytest.mark.parametrize(
    "p, stars",
    [(0.0, "***"), (0.001, "***"), (0.0010001, "**"), (0.01, "**"), (0.0100001, "*"),
     (0.05, "*"), (0.0500001, ""), (1.0, "")],
)
def test_significance_star_boundaries(p, stars):
    assert significance_stars(p) == stars


def test_significance_stars_rejects_out_of_range():
    with pytest.raises(ValueError):
        significance_stars(1.5)

"""Independent reference implementations used as test oracles.

Each one computes the expected value by a different route than the library:
exhaustive enumeration, numerical integration, dense search or closed-form
geometry.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy import integrate
from scipy.spatial.transform import Rotation
from scipy.special import gammaln

# ----------------------------------------------------------------- best@k


def enumerate_best_at_k(n: int, c: int, k: int) -> Fraction:
    """Fraction of k-subsets of n poses (the first c successful) holding a success."""
    subsets = list(itertools.combinations(range(n), k))
    # combinations are sorted, so a subset holds a success iff its minimum is < c
    return Fraction(sum(1 for s in subsets if s[0] < c), len(subsets))


def best_at_k_table(max_n: int) -> dict[tuple[int, int, int], Fraction]:
    """Enumerated best@k for every n <= max_n, 0 <= c <= n, 1 <= k <= n."""
    out = {}
    for n in range(1, max_n + 1):
        for k in range(1, n + 1):
            subsets = list(itertools.combinations(range(n), k))
            minima = [s[0] for s in subsets]
            for c in range(n + 1):
                out[(n, c, k)] = Fraction(sum(1 for m in minima if m < c), len(subsets))
    return out


# -------------------------------------------------------------- bootstrap

M64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + GAMMA) & M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def bootstrap(values, iters: int, seed: int) -> tuple[float, float]:
    """Pure-integer reimplementation of the documented generator and resampling order."""
    n = len(values)
    means = []
    for it in range(iters):
        key = splitmix64(splitmix64(seed) ^ it)
        idx = [(splitmix64((key + i * GAMMA) & M64) * n) >> 64 for i in range(n)]
        means.append(math.fsum(values[j] for j in idx) / n)
    mean = math.fsum(means) / iters
    sem = math.sqrt(math.fsum((m - mean) ** 2 for m in means) / (iters - 1)) if iters > 1 else 0.0
    return mean, sem


# ----------------------------------------------------------------- t-test


def t_upper_tail(t: float, df: int) -> float:
    """P(T > t) by adaptive quadrature of the Student-t density."""
    log_c = gammaln((df + 1) / 2) - gammaln(df / 2) - 0.5 * math.log(df * math.pi)

    def density(x):
        return math.exp(log_c - (df + 1) / 2 * math.log1p(x * x / df))

    if t < 0:
        return 1.0 - t_upper_tail(-t, df)
    val, _ = integrate.quad(density, t, np.inf, epsabs=1e-13)
    return val


# ----------------------------------------------------------- superposition


def grid_search_superposition_rmsd(P, Q) -> float:
    """Minimum RMSD of P onto Q over rotations found by grid plus pattern search.

    For a fixed rotation the best translation aligns centroids, so only the
    rotation (as a rotation vector) is searched.
    """
    Pc = P - P.mean(axis=0)
    Qc = Q - Q.mean(axis=0)

    def cost(v):
        R = Rotation.from_rotvec(v).as_matrix()
        return np.sqrt(np.mean(np.sum((Pc @ R.T - Qc) ** 2, axis=1)))

    axis = np.linspace(-np.pi, np.pi, 13)
    best_v, best = None, np.inf
    for v in itertools.product(axis, axis, axis):
        v = np.array(v)
        if np.linalg.norm(v) > np.pi + 1e-9:
            continue
        c = cost(v)
        if c < best:
            best_v, best = v, c
    step = axis[1] - axis[0]
    while step > 1e-9:
        improved = False
        for d in range(3):
            for sgn in (1, -1):
                trial = best_v.copy()
                trial[d] += sgn * step
                c = cost(trial)
                if c < best:
                    best_v, best, improved = trial, c, True
        if not improved:
            step /= 2
    return best


def brute_force_bisy(truth_syms, truth_bonds, truth_xyz, pred_syms, pred_bonds, pred_xyz, site_truth, site_pred) -> float:
    """Superpose with scipy on the site atoms, then minimise over every valid bijection."""
    R, _ = Rotation.align_vectors(site_truth - site_truth.mean(0), site_pred - site_pred.mean(0))
    moved = R.apply(pred_xyz - site_pred.mean(0)) + site_truth.mean(0)
    tb = {frozenset((i, j)) for i, j, *_ in truth_bonds}
    pb = {frozenset((i, j)) for i, j, *_ in pred_bonds}
    best = np.inf
    n = len(truth_syms)
    for perm in itertools.permutations(range(n)):
        if any(truth_syms[i] != pred_syms[perm[i]] for i in range(n)):
            continue
        if {frozenset((perm[i], perm[j])) for i, j in map(tuple, tb)} != pb:
            continue
        best = min(best, np.sqrt(np.mean(np.sum((moved[list(perm)] - truth_xyz) ** 2, axis=1))))
    return best


# ------------------------------------------------------------ two spheres


def lens_fraction(r1: float, r2: float, d: float) -> float:
    """Fraction of sphere 1 inside sphere 2 (closed-form cap volumes)."""
    v1 = 4.0 / 3.0 * math.pi * r1 ** 3
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2) + 1e-9:
        return 1.0 if r1 <= r2 else (4.0 / 3.0 * math.pi * r2 ** 3) / v1
    lens = math.pi * (r1 + r2 - d) ** 2 * (d * d + 2 * d * r2 - 3 * r2 * r2 + 2 * d * r1 + 6 * r1 * r2 - 3 * r1 * r1) / (12 * d)
    return lens / v1

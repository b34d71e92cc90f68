"""Per-bin aggregation over entry annotations."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .run import RunResults, aggregate_entries

logger = logging.getLogger(__name__)

AXES = ("pocket_similarity", "ligand_frequency", "tanimoto")
DEFAULT_SIMILARITY_EDGES = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
DEFAULT_FREQUENCY_EDGES = (0, 1, 11, math.inf)


@dataclass(frozen=True)
class StratificationSpec:
    """Bins ``[e_i, e_{i+1})``; the last bin is closed when its upper edge is finite.

    On the frequency axis the default edges (0, 1, 11, inf) give the bins
    {0}, 1-10 and >10.
    """

    axis: str
    bin_edges: tuple[float, ...]

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r}; expected one of {AXES}")
        edges = tuple(self.bin_edges)
        if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("bin edges must be strictly increasing with at least two values")
        object.__setattr__(self, "bin_edges", edges)

    @classmethod
    def default(cls, axis: str) -> "StratificationSpec":
        edges = DEFAULT_FREQUENCY_EDGES if axis == "ligand_frequency" else DEFAULT_SIMILARITY_EDGES
        return cls(axis, edges)

    def labels(self) -> list[str]:
        out = []
        e = self.bin_edges
        for i in range(len(e) - 1):
            lo, hi = e[i], e[i + 1]
            if self.axis == "ligand_frequency":
                lo_i = int(lo)
                if math.isinf(hi):
                    out.append(f">{lo_i - 1}")
                elif hi - lo == 1:
                    out.append(str(lo_i))
                else:
                    out.append(f"{lo_i}-{int(hi) - 1}")
            else:
                close = "]" if i == len(e) - 2 and not math.isinf(hi) else ")"
                out.append(f"[{lo:g}, {hi:g}{close}")
        return out

    def bin_of(self, value: float) -> int | None:
        e = self.bin_edges
        if value == e[-1] and not math.isinf(value):
            return len(e) - 2
        for i in range(len(e) - 1):
            if e[i] <= value < e[i + 1]:
                return i
        return None


def stratify(results: RunResults, spec: StratificationSpec, criterion: str, k: int, annotations: dict | None = None) -> dict:
    """Aggregate ``criterion`` at best@k within each bin of ``spec``."""
    annotations = results.annotations if annotations is None else annotations
    by_entry = results.by_entry
    bins: list[dict] = [{} for _ in range(len(spec.bin_edges) - 1)]
    missing, outside = [], []
    for eid, poses in by_entry.items():
        value = (annotations.get(eid) or {}).get(spec.axis)
        if value is None:
            missing.append(eid)
            continue
        idx = spec.bin_of(float(value))
        if idx is None:
            outside.append(eid)
            continue
        bins[idx][eid] = poses
    if missing:
        logger.warning("%d entries lack a %s annotation and were excluded", len(missing), spec.axis)
    cfg = results.config
    out_bins = []
    for label, members in zip(spec.labels(), bins):
        agg = aggregate_entries(members, criterion, k, cfg.bootstrap_iters, cfg.seed)
        out_bins.append({"bin": label, "n": agg.n_structures, "mean": agg.mean, "sem": agg.sem})
    return {
        "axis": spec.axis,
        "criterion": criterion,
        "k": k,
        "edges": [e if not math.isinf(e) else None for e in spec.bin_edges],
        "bins": out_bins,
        "excluded_missing": sorted(missing),
        "excluded_out_of_range": sorted(outside),
    }


def stratify_all(results: RunResults) -> dict:
    """Default-bin stratification on every annotated axis, for every criterion and k."""
    out = {}
    for axis in AXES:
        if not any(axis in (a or {}) for a in results.annotations.values()):
            continue
        spec = StratificationSpec.default(axis)
        out[axis] = [
            stratify(results, spec, criterion, k)
            for criterion in results.config.criteria
            for k in results.config.k_values
        ]
    return out


__all__ = ["AXES", "StratificationSpec", "stratify", "stratify_all"]

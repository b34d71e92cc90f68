"""Benchmark orchestration: score every pose, aggregate, persist."""

from __future__ import annotations

import csv
import functools
import hashlib
import io
import json
import logging
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import groupby
from pathlib import Path

import numpy as np

import cofoldbench
from cofoldbench import stats
from cofoldbench.chemio import BenchmarkManifest, Rejection, load_complex, normalize_manifest, parse_ligand, structure_format
from cofoldbench.errors import BenchError
from cofoldbench.geom import bisy_rmsd, lddt_pli
from cofoldbench.molgraph import graphs_match
from cofoldbench.stats import AggregateResult, StructureOutcome
from cofoldbench.validity import CheckReport, run_all_checks

from .config import BINARY_CRITERIA, RunConfig

logger = logging.getLogger(__name__)

POSE_COLUMNS = ("entry_id", "seed", "sample", "status", "rmsd", "lddt_pli", "pb_valid", "confidence", "failed_checks", "error")


@dataclass(frozen=True)
class PoseMetrics:
    entry_id: str
    seed: int
    sample: int
    status: str = "ok"
    rmsd: float | None = None
    lddt_pli: float | None = None
    pb_valid: bool = False
    confidence: float | None = None
    failed_checks: tuple[str, ...] = ()
    error: str = ""
    wall_time: float = field(default=0.0, compare=False)
    check_values: CheckReport | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.rmsd is not None and self.rmsd < 0:
            raise ValueError("rmsd must be nonnegative")
        if self.lddt_pli is not None and not 0.0 <= self.lddt_pli <= 1.0:
            raise ValueError("lddt_pli must lie in [0, 1]")

    @property
    def order_key(self) -> tuple[str, int, int]:
        return (self.entry_id, self.seed, self.sample)


def pose_success(pose: PoseMetrics, criterion: str) -> bool:
    """Binary success of one pose; failed poses never succeed."""
    if pose.rmsd is None:
        return False
    if criterion == "rmsd<2":
        return pose.rmsd < 2.0
    if criterion == "rmsd<1":
        return pose.rmsd < 1.0
    if criterion == "rmsd<2&pb":
        return pose.rmsd < 2.0 and pose.pb_valid
    if criterion == "rmsd<1&pb":
        return pose.rmsd < 1.0 and pose.pb_valid
    raise ValueError(f"{criterion!r} is not a binary criterion")


def pose_score(pose: PoseMetrics, criterion: str) -> float:
    if criterion == "lddt_pli":
        return pose.lddt_pli if pose.lddt_pli is not None else 0.0
    return 1.0 if pose_success(pose, criterion) else 0.0


def group_by_entry(poses) -> dict[str, list[PoseMetrics]]:
    ordered = sorted(poses, key=lambda p: p.order_key)
    return {eid: list(grp) for eid, grp in groupby(ordered, key=lambda p: p.entry_id)}


def structure_outcome(entry_id: str, poses: list[PoseMetrics], criterion: str) -> StructureOutcome:
    flags = [pose_success(p, criterion) for p in poses]
    conf = None
    if poses and all(p.confidence is not None for p in poses):
        conf = stats.select_max_confidence(poses, lambda p: pose_success(p, criterion))
    return StructureOutcome(entry_id, len(poses), sum(flags), conf, tuple(poses))


def entry_score(poses: list[PoseMetrics], criterion: str, k: int) -> float:
    """Per-structure best@k: success probability, or expected best lDDT-PLI."""
    if criterion == "lddt_pli":
        return stats.expected_max_at_k([pose_score(p, criterion) for p in poses], k)
    return stats.best_at_k(len(poses), sum(pose_success(p, criterion) for p in poses), k)


def entry_scores(by_entry: dict[str, list[PoseMetrics]], criterion: str, k: int) -> dict[str, float]:
    return {eid: entry_score(ps, criterion, k) for eid, ps in by_entry.items()}


def aggregate_entries(by_entry: dict[str, list[PoseMetrics]], criterion: str, k: int, iters: int, seed: int, workers: int = 1) -> AggregateResult:
    if not by_entry:
        return AggregateResult(criterion, k, None, None, 0)
    if criterion == "lddt_pli":
        values = list(entry_scores(by_entry, criterion, k).values())
        mean = math.fsum(values) / len(values)
    else:
        outcomes = [structure_outcome(eid, ps, criterion) for eid, ps in by_entry.items()]
        values = [stats.best_at_k(o.n, o.c, k) for o in outcomes]
        mean = stats.aggregate(outcomes, k)
    _, sem = stats.bootstrap(values, iters, seed, workers)
    return AggregateResult(criterion, k, mean, sem, len(values))


def aggregate_top_confidence(by_entry, criterion: str, iters: int, seed: int) -> AggregateResult | None:
    """Success rate of the single most confident pose, if every pose has a confidence."""
    if not by_entry or any(p.confidence is None for ps in by_entry.values() for p in ps):
        return None
    if criterion == "lddt_pli":
        values = []
        for ps in by_entry.values():
            top = max(sorted(ps, key=lambda p: (p.seed, p.sample)), key=lambda p: p.confidence)
            values.append(pose_score(top, criterion))
    else:
        values = [1.0 if structure_outcome(eid, ps, criterion).confidence_best_success else 0.0 for eid, ps in by_entry.items()]
    _, sem = stats.bootstrap(values, iters, seed)
    return AggregateResult(criterion, None, math.fsum(values) / len(values), sem, len(values))


@dataclass
class RunResults:
    dataset: str
    method: str
    config: RunConfig
    poses: list[PoseMetrics]
    aggregates: list[AggregateResult]
    top_confidence: list[AggregateResult] = field(default_factory=list)
    skipped: list[Rejection] = field(default_factory=list)
    annotations: dict[str, dict] = field(default_factory=dict)
    stratified: dict = field(default_factory=dict)

    @property
    def by_entry(self) -> dict[str, list[PoseMetrics]]:
        return group_by_entry(self.poses)

    def aggregate(self, criterion: str, k: int) -> AggregateResult:
        for a in self.aggregates:
            if a.metric_name == criterion and a.k == k:
                return a
        raise KeyError((criterion, k))


@functools.lru_cache(maxsize=32)
def _load_truth(protein_path: str, ligand_path: str):
    return load_complex(protein_path, ligand_path)


def _reference_in_pred_order(ref_path: str, pred_graph):
    ref_graph, ref_xyz = parse_ligand(Path(ref_path).read_bytes(), structure_format(ref_path))
    m = graphs_match(ref_graph, pred_graph)
    if m is None:
        raise BenchError("reference conformer does not match the predicted ligand graph")
    out = np.empty_like(ref_xyz)
    out[list(m)] = ref_xyz
    return out


def score_pose(task: tuple) -> PoseMetrics:
    """Score one (entry, pose); every failure is folded into the returned record."""
    entry_id, truth_paths, pose, ref_path, cfg = task
    start = time.perf_counter()
    base = dict(entry_id=entry_id, seed=pose.seed, sample=pose.sample, confidence=pose.confidence)
    try:
        truth = _load_truth(*truth_paths)
        pred = load_complex(pose.path, pose.ligand_path)
        if not pred.ligands:
            raise BenchError("pose has no ligand file")
    except (BenchError, OSError, ValueError) as exc:
        report = run_all_checks(None, None, cfg.checks)
        return PoseMetrics(**base, status="load_failed", error=str(exc), failed_checks=tuple(report.failed()),
                           wall_time=time.perf_counter() - start, check_values=report)

    errors = []
    try:
        rmsd = bisy_rmsd(truth, pred, cfg.site_cutoff)
    except (BenchError, ValueError) as exc:
        rmsd = None
        errors.append(f"rmsd: {exc}")
    try:
        lddt = lddt_pli(truth, pred, cfg.lddt)
    except (BenchError, ValueError) as exc:
        lddt = None
        errors.append(f"lddt: {exc}")
    ref = None
    if ref_path is not None:
        try:
            ref = _reference_in_pred_order(ref_path, pred.ligand.graph)
        except (BenchError, OSError, ValueError) as exc:
            errors.append(f"reference: {exc}")
    report = run_all_checks(truth, pred, cfg.checks, ref)
    return PoseMetrics(
        **base,
        status="ok" if rmsd is not None else "score_failed",
        rmsd=rmsd,
        lddt_pli=lddt,
        pb_valid=report.pb_valid,
        failed_checks=tuple(report.failed()),
        error="; ".join(errors),
        wall_time=time.perf_counter() - start,
        check_values=report,
    )


def _collect_tasks(manifest: BenchmarkManifest, cfg: RunConfig):
    tasks, skipped = [], []
    for entry in manifest.entries:
        if entry.truth_ligand_path is None:
            skipped.append(Rejection(entry.id, "no reference ligand file"))
            continue
        truth_paths = (str(manifest.resolve(entry.truth_path)), str(manifest.resolve(entry.truth_ligand_path)))
        try:
            truth = _load_truth(*truth_paths)
            truth.ligand
        except (BenchError, OSError, ValueError) as exc:
            skipped.append(Rejection(entry.id, f"reference failed to load: {exc}"))
            continue
        ref = manifest.resolve(entry.reference_conformer)
        for pose in entry.poses:
            resolved = type(pose)(pose.seed, pose.sample, str(manifest.resolve(pose.path)),
                                  None if pose.ligand_path is None else str(manifest.resolve(pose.ligand_path)),
                                  pose.confidence)
            tasks.append((entry.id, truth_paths, resolved, None if ref is None else str(ref), cfg))
    return tasks, skipped


def run_benchmark(manifest: BenchmarkManifest, config: RunConfig | None = None, out_dir: Path | str | None = None) -> RunResults:
    """Score every pose of a (date-filtered) manifest and aggregate.

    The manifest is normalised to ``config.required_poses`` poses per entry
    first; entries with too few poses or an unreadable reference are
    skipped and listed in the results. Results are written to ``out_dir``
    (or ``config.out``) when one is given.
    """
    cfg = config or RunConfig()
    manifest, rejected = normalize_manifest(manifest, cfg.required_poses)
    tasks, skipped = _collect_tasks(manifest, cfg)
    skipped = sorted(rejected + skipped, key=lambda r: r.entry_id)
    for r in skipped:
        logger.warning("skipping entry %s: %s", r.entry_id, r.reason)

    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            poses = list(pool.map(score_pose, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
    else:
        poses = [score_pose(t) for t in tasks]
    poses.sort(key=lambda p: p.order_key)

    by_entry = group_by_entry(poses)
    aggregates, top = [], []
    for criterion in cfg.criteria:
        for k in cfg.k_values:
            aggregates.append(aggregate_entries(by_entry, criterion, k, cfg.bootstrap_iters, cfg.seed))
        t = aggregate_top_confidence(by_entry, criterion, cfg.bootstrap_iters, cfg.seed)
        if t is not None:
            top.append(t)

    annotations = {e.id: dict(e.annotations or {}) for e in manifest.entries if e.id in by_entry}
    results = RunResults(manifest.dataset_name, cfg.method, cfg, poses, aggregates, top, skipped, annotations)

    from .stratify import stratify_all

    results.stratified = stratify_all(results)
    target = out_dir if out_dir is not None else cfg.out
    if target is not None:
        write_results(results, target)
    return results


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def poses_csv(poses) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(POSE_COLUMNS)
    for p in poses:
        w.writerow([
            p.entry_id, p.seed, p.sample, p.status, _fmt(p.rmsd), _fmt(p.lddt_pli),
            _fmt(p.pb_valid), _fmt(p.confidence), ";".join(p.failed_checks), p.error,
        ])
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def write_results(results: RunResults, out_dir: Path | str) -> Path:
    """Write poses.csv, aggregates.json, stratified.json, run.json and timings.csv.

    Everything except timings.csv is a pure function of inputs and config.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "poses.csv": poses_csv(results.poses),
        "aggregates.json": _dump({
            "dataset": results.dataset,
            "method": results.method,
            "best_at_k": [a.to_dict() for a in results.aggregates],
            "top_confidence": [a.to_dict() for a in results.top_confidence],
        }),
        "stratified.json": _dump(results.stratified),
    }
    import networkx
    import scipy

    meta = {
        "dataset": results.dataset,
        "method": results.method,
        "config": results.config.to_dict(),
        "config_sha256": results.config.digest(),
        "versions": {
            "cofoldbench": cofoldbench.__version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "networkx": networkx.__version__,
        },
        "n_entries": len(results.by_entry),
        "n_poses": len(results.poses),
        "skipped": [{"entry_id": r.entry_id, "reason": r.reason} for r in results.skipped],
        "annotations": results.annotations,
        "sha256": {name: _sha(text) for name, text in files.items()},
    }
    files["run.json"] = _dump(meta)
    for name, text in files.items():
        (out / name).write_text(text)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("entry_id", "seed", "sample", "wall_time"))
    for p in results.poses:
        w.writerow((p.entry_id, p.seed, p.sample, f"{p.wall_time:.6f}"))
    (out / "timings.csv").write_text(buf.getvalue())

    from .report import render_report

    render_report([results], out / "report")
    return out


def _opt_float(s: str):
    return float(s) if s != "" else None


def load_results(out_dir: Path | str) -> RunResults:
    """Rebuild a :class:`RunResults` from a run directory (check details are not kept)."""
    from .config import config_from_mapping

    out = Path(out_dir)
    try:
        meta = json.loads((out / "run.json").read_text())
        agg = json.loads((out / "aggregates.json").read_text())
        rows = list(csv.DictReader(io.StringIO((out / "poses.csv").read_text())))
        strat_path = out / "stratified.json"
        stratified = json.loads(strat_path.read_text()) if strat_path.exists() else {}
    except (OSError, json.JSONDecodeError) as exc:
        raise BenchError(f"cannot read results from {out}: {exc}") from None
    poses = [
        PoseMetrics(
            entry_id=r["entry_id"], seed=int(r["seed"]), sample=int(r["sample"]), status=r["status"],
            rmsd=_opt_float(r["rmsd"]), lddt_pli=_opt_float(r["lddt_pli"]), pb_valid=r["pb_valid"] == "1",
            confidence=_opt_float(r["confidence"]),
            failed_checks=tuple(x for x in r["failed_checks"].split(";") if x), error=r["error"],
        )
        for r in rows
    ]
    c = meta["config"]
    flat = {
        "method": meta["method"],
        "k_values": ",".join(map(str, c["k_values"])),
        "criteria": ",".join(c["criteria"]),
        "bootstrap_iters": str(c["bootstrap_iters"]),
        "seed": str(c["seed"]),
        "required_poses": str(c["required_poses"]),
        "site_cutoff": str(c["site_cutoff"]),
        "significance": c["significance"],
        "lddt.inclusion_radius": str(c["lddt"]["inclusion_radius"]),
        "lddt.thresholds": ",".join(map(str, c["lddt"]["thresholds"])),
    }
    flat.update({f"check.{k}": str(v) for k, v in c["checks"].items()})
    cfg = config_from_mapping(flat)

    def agg_list(items):
        return [AggregateResult(a["metric_name"], a["k"], a["mean"], a["sem"], a["n_structures"]) for a in items]

    return RunResults(
        dataset=meta["dataset"], method=meta["method"], config=cfg, poses=poses,
        aggregates=agg_list(agg["best_at_k"]), top_confidence=agg_list(agg["top_confidence"]),
        skipped=[Rejection(s["entry_id"], s["reason"]) for s in meta["skipped"]],
        annotations=meta.get("annotations", {}), stratified=stratified,
    )


__all__ = [
    "BINARY_CRITERIA",
    "PoseMetrics",
    "RunResults",
    "aggregate_entries",
    "entry_score",
    "entry_scores",
    "group_by_entry",
    "load_results",
    "pose_success",
    "run_benchmark",
    "score_pose",
    "write_results",
]

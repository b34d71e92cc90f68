"""Benchmark manifests and the dataset curation rules applied to them.

A manifest is one JSON document::

    {
      "dataset": "runs-n-poses",
      "entries": [
        {
          "id": "8abc__1__1.A__1.C",
          "release_date": "2023-07-14",
          "truth_path": "truth/8abc_protein.pdb",
          "truth_ligand_path": "truth/8abc_ligand.sdf",
          "regime": "unconditional",
          "pocket_residues": ["A:42", "A:87"],
          "annotations": {"pocket_similarity": 0.13, "ligand_frequency": 0, "tanimoto": 0.1},
          "reference_conformer": "truth/8abc_conformer.sdf",
          "poses": [
            {"seed": 1, "sample": 1, "path": "pred/s1_0.pdb",
             "ligand_path": "pred/s1_0.sdf", "confidence": 0.82}
          ]
        }
      ]
    }

Relative paths resolve against the manifest's directory.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from cofoldbench.errors import ManifestError
from cofoldbench.structure import ResidueKey

REGIMES = ("unconditional", "conditional")
ANNOTATION_KEYS = ("pocket_similarity", "ligand_frequency", "tanimoto")
TEMPLATE_GAP_DAYS = 60


@dataclass(frozen=True)
class PoseRef:
    seed: int
    sample: int
    path: str
    ligand_path: str | None = None
    confidence: float | None = None

    @property
    def order_key(self) -> tuple[int, int]:
        return (self.seed, self.sample)


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    release_date: dt.date
    truth_path: str
    poses: tuple[PoseRef, ...]
    regime: str = "unconditional"
    truth_ligand_path: str | None = None
    pocket_residues: tuple[ResidueKey, ...] | None = None
    annotations: dict | None = field(default=None, hash=False)
    reference_conformer: str | None = None

    def __post_init__(self):
        keys = [p.order_key for p in self.poses]
        if len(set(keys)) != len(keys):
            raise ManifestError(f"entry {self.id}: duplicate (seed, sample) pairs")
        if self.regime not in REGIMES:
            raise ManifestError(f"entry {self.id}: unknown regime {self.regime!r}")


@dataclass(frozen=True)
class BenchmarkManifest:
    dataset_name: str
    entries: tuple[ManifestEntry, ...]
    base_dir: Path = field(default=Path("."), compare=False)

    def resolve(self, path: str | None) -> Path | None:
        if path is None:
            return None
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def with_entries(self, entries) -> "BenchmarkManifest":
        return replace(self, entries=tuple(entries))


@dataclass(frozen=True)
class Rejection:
    entry_id: str
    reason: str


def _parse_date(value, entry_id: str) -> dt.date:
    if isinstance(value, dt.date):
        return value
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError:
        raise ManifestError(f"entry {entry_id}: release_date {value!r} is not an ISO-8601 date") from None


def _entry_from_dict(raw: dict) -> ManifestEntry:
    try:
        entry_id = str(raw["id"])
        truth_path = raw["truth_path"]
        poses_raw = raw["poses"]
    except KeyError as exc:
        raise ManifestError(f"manifest entry lacks {exc.args[0]!r}") from None
    poses = []
    for p in poses_raw:
        try:
            poses.append(PoseRef(
                seed=int(p["seed"]),
                sample=int(p["sample"]),
                path=p["path"],
                ligand_path=p.get("ligand_path"),
                confidence=None if p.get("confidence") is None else float(p["confidence"]),
            ))
        except KeyError as exc:
            raise ManifestError(f"entry {entry_id}: pose lacks {exc.args[0]!r}") from None
    pocket = raw.get("pocket_residues")
    annotations = raw.get("annotations")
    if annotations is not None:
        unknown = set(annotations) - set(ANNOTATION_KEYS)
        if unknown:
            raise ManifestError(f"entry {entry_id}: unknown annotations {sorted(unknown)}")
        for key in ("pocket_similarity", "tanimoto"):
            v = annotations.get(key)
            if v is not None and not 0.0 <= float(v) <= 1.0:
                raise ManifestError(f"entry {entry_id}: {key} must lie in [0, 1]")
        freq = annotations.get("ligand_frequency")
        if freq is not None and (int(freq) != freq or freq < 0):
            raise ManifestError(f"entry {entry_id}: ligand_frequency must be a nonnegative integer")
    return ManifestEntry(
        id=entry_id,
        release_date=_parse_date(raw.get("release_date"), entry_id),
        truth_path=truth_path,
        truth_ligand_path=raw.get("truth_ligand_path"),
        poses=tuple(poses),
        regime=raw.get("regime", "unconditional"),
        pocket_residues=None if pocket is None else tuple(ResidueKey.parse(k) for k in pocket),
        annotations=annotations,
        reference_conformer=raw.get("reference_conformer"),
    )


def manifest_from_dict(data: dict, base_dir: Path | str = ".") -> BenchmarkManifest:
    if "entries" not in data:
        raise ManifestError("manifest lacks 'entries'")
    entries = tuple(_entry_from_dict(e) for e in data["entries"])
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise ManifestError("manifest has duplicate entry ids")
    return BenchmarkManifest(str(data.get("dataset", "")), entries, Path(base_dir))


def load_manifest(path: Path | str) -> BenchmarkManifest:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON ({exc})") from None
    return manifest_from_dict(data, path.parent)


def manifest_to_dict(manifest: BenchmarkManifest) -> dict:
    entries = []
    for e in manifest.entries:
        item = {
            "id": e.id,
            "release_date": e.release_date.isoformat(),
            "truth_path": e.truth_path,
            "regime": e.regime,
            "poses": [
                {k: v for k, v in (
                    ("seed", p.seed), ("sample", p.sample), ("path", p.path),
                    ("ligand_path", p.ligand_path), ("confidence", p.confidence),
                ) if v is not None}
                for p in e.poses
            ],
        }
        if e.truth_ligand_path is not None:
            item["truth_ligand_path"] = e.truth_ligand_path
        if e.pocket_residues is not None:
            item["pocket_residues"] = [str(k) for k in e.pocket_residues]
        if e.annotations is not None:
            item["annotations"] = dict(e.annotations)
        if e.reference_conformer is not None:
            item["reference_conformer"] = e.reference_conformer
        entries.append(item)
    return {"dataset": manifest.dataset_name, "entries": entries}


def filter_by_release_date(manifest: BenchmarkManifest, cutoff: dt.date, mode: str = "on_or_after") -> BenchmarkManifest:
    """Keep entries released on/after (``on_or_after``) or strictly after (``after``) ``cutoff``."""
    if mode == "on_or_after":
        keep = [e for e in manifest.entries if e.release_date >= cutoff]
    elif mode == "after":
        keep = [e for e in manifest.entries if e.release_date > cutoff]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return manifest.with_entries(keep)


def normalize_poses(entry: ManifestEntry, required: int = 20) -> ManifestEntry | Rejection:
    """Keep the first ``required`` poses in (seed, sample) order.

    Entries with too few poses come back as a :class:`Rejection`.
    """
    if required <= 0:
        raise ValueError("required must be positive")
    if len(entry.poses) < required:
        return Rejection(entry.id, f"only {len(entry.poses)} poses, {required} required")
    poses = sorted(entry.poses, key=lambda p: p.order_key)[:required]
    return replace(entry, poses=tuple(poses))


def normalize_manifest(manifest: BenchmarkManifest, required: int = 20) -> tuple[BenchmarkManifest, list[Rejection]]:
    kept, rejected = [], []
    for entry in manifest.entries:
        out = normalize_poses(entry, required)
        (rejected if isinstance(out, Rejection) else kept).append(out)
    return manifest.with_entries(kept), rejected


def template_eligible(template_release: dt.date, test_release: dt.date, hard_cutoff: dt.date) -> bool:
    """A template may be used if released by ``hard_cutoff`` and more than 60 days before the test structure."""
    return (
        template_release <= hard_cutoff
        and template_release + dt.timedelta(days=TEMPLATE_GAP_DAYS) < test_release
    )

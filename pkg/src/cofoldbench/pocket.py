"""Pocket-residue selection for pocket-conditional benchmarking.

At most two residues are chosen. Candidates are residues with a heavy atom
within 6 A of the ligand. Each candidate is scored by the median, over ligand
heavy atoms, of the atom's distance to the nearest heavy atom of the residue.
The best-scoring candidate is picked first; the second pick is the best
remaining candidate at least eight positions away in sequence (residues on
another chain always qualify).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from cofoldbench.structure import ComplexStructure, ResidueKey

logger = logging.getLogger(__name__)

CANDIDATE_RADIUS = 6.0
MIN_SEQ_SEPARATION = 8


@dataclass(frozen=True)
class PocketSelection:
    residues: tuple[ResidueKey, ...]
    median_distances: tuple[float, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.residues) > 2:
            raise ValueError("a pocket selection holds at most two residues")
        if len(self.residues) == 2:
            a, b = self.residues
            if a.chain == b.chain and abs(a.seq - b.seq) < MIN_SEQ_SEPARATION:
                raise ValueError("selected residues are too close in sequence")

    def to_dict(self, entry_id: str) -> dict:
        return {
            "entry_id": entry_id,
            "residues": [
                {"chain": k.chain, "seq": k.seq, "icode": k.icode, "name": n, "median_distance": d}
                for k, n, d in zip(self.residues, self.names or ("",) * len(self.residues), self.median_distances)
            ],
        }


def separated(a: ResidueKey, b: ResidueKey, min_sep: int = MIN_SEQ_SEPARATION) -> bool:
    return a.chain != b.chain or abs(a.seq - b.seq) >= min_sep


def residue_scores(truth: ComplexStructure, radius: float = CANDIDATE_RADIUS, mode: str = "residue_min") -> dict[ResidueKey, tuple[float, str]]:
    """Score every candidate residue.

    ``mode="residue_min"`` takes, per ligand atom, the distance to the
    residue's nearest heavy atom and reports the median over ligand atoms.
    ``mode="pairs"`` instead takes the median over all ligand/residue atom
    pairs closer than ``radius``.
    """
    lig = truth.ligand.coords
    scores = {}
    for res in truth.residues():
        xyz = res.coords()
        if len(xyz) == 0:
            continue
        d = np.linalg.norm(lig[:, None, :] - xyz[None, :, :], axis=-1)
        if not (d < radius).any():
            continue
        if mode == "residue_min":
            score = float(np.median(d.min(axis=1)))
        elif mode == "pairs":
            score = float(np.median(d[d < radius]))
        else:
            raise ValueError(f"unknown scoring mode {mode!r}")
        scores[res.key] = (score, res.res_name)
    return scores


def select_pocket_residues(truth: ComplexStructure, radius: float = CANDIDATE_RADIUS, mode: str = "residue_min") -> PocketSelection:
    """Pick up to two pocket residues from the reference complex.

    Returns an empty selection (and logs a warning) when no residue lies
    within ``radius`` of the ligand.
    """
    scores = residue_scores(truth, radius, mode)
    if not scores:
        logger.warning("no residue within %.1f A of the ligand; empty pocket selection", radius)
        return PocketSelection((), ())
    ranked = sorted(scores, key=lambda k: (scores[k][0], k.chain, k.seq, k.icode))
    first = ranked[0]
    picks = [first]
    for key in ranked[1:]:
        if separated(first, key):
            picks.append(key)
            break
    return PocketSelection(
        residues=tuple(picks),
        median_distances=tuple(scores[k][0] for k in picks),
        names=tuple(scores[k][1] for k in picks),
    )

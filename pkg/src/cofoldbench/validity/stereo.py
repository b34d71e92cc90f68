"""Tetrahedral and double-bond stereochemistry of the pose vs. the reference graph."""

from __future__ import annotations

import numpy as np

from cofoldbench.errors import TopologyError
from cofoldbench.geom import ligand_correspondences
from cofoldbench.molgraph import MolecularGraph
from cofoldbench.molgraph.stereo import dihedral, signed_volume

from .report import CheckResult

_PLANAR_EPS = 1e-3


def _chirality_mismatches(truth: MolecularGraph, coords: np.ndarray, m) -> int:
    bad = 0
    for c, atom in enumerate(truth.atoms):
        if atom.parity is None:
            continue
        refs = truth.neighbors[c][:3]
        vol = signed_volume(coords, m[c], [m[r] for r in refs])
        if abs(vol) < _PLANAR_EPS or (vol > 0) != (atom.parity > 0):
            bad += 1
    return bad


def _double_bond_mismatches(truth: MolecularGraph, coords: np.ndarray, m) -> int:
    bad = 0
    for b in truth.bonds:
        if b.stereo is None:
            continue
        ri = min(x for x in truth.neighbors[b.i] if x != b.j)
        rj = min(x for x in truth.neighbors[b.j] if x != b.i)
        angle = dihedral(coords[m[ri]], coords[m[b.i]], coords[m[b.j]], coords[m[rj]])
        config = "cis" if abs(angle) < 90.0 else "trans"
        if config != b.stereo:
            bad += 1
    return bad


def _best(maps, count) -> int:
    best = None
    for m in maps:
        n = count(m)
        if best is None or n < best:
            best = n
        if best == 0:
            break
    return best or 0


def check_stereo(truth_graph: MolecularGraph, pred_graph: MolecularGraph, pred_coords) -> dict[str, CheckResult]:
    """Compare stereo of the pose against the annotations on the reference graph.

    Each check passes if some symmetry-equivalent atom correspondence makes
    every annotated centre (or double bond) agree; the reported value is the
    smallest number of disagreements found.
    """
    n_centers = sum(a.parity is not None for a in truth_graph.atoms)
    n_double = sum(b.stereo is not None for b in truth_graph.bonds)
    try:
        maps = ligand_correspondences(truth_graph, pred_graph)
    except TopologyError:
        msg = "graphs do not match"
        return {
            "tetrahedral_chirality": CheckResult(False, None, msg),
            "double_bond_stereochemistry": CheckResult(False, None, msg),
        }
    coords = np.asarray(pred_coords, dtype=float)

    chi = _best(maps, lambda m: _chirality_mismatches(truth_graph, coords, m)) if n_centers else 0
    dbl = _best(maps, lambda m: _double_bond_mismatches(truth_graph, coords, m)) if n_double else 0
    return {
        "tetrahedral_chirality": CheckResult(
            chi == 0, float(chi), f"{chi}/{n_centers} stereocentre(s) inverted"
        ),
        "double_bond_stereochemistry": CheckResult(
            dbl == 0, float(dbl), f"{dbl}/{n_double} double bond(s) flipped"
        ),
    }

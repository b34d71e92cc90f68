"""Superposition and pose-accuracy metrics."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from cofoldbench.errors import CoverageError, DegenerateGeometryError, EmptySiteError, TopologyError
from cofoldbench.molgraph import MolecularGraph, automorphisms, graphs_match
from cofoldbench.molgraph.iso import DEFAULT_MAX_AUTOMORPHISMS
from cofoldbench.structure import ComplexStructure, ResidueKey

DEFAULT_SITE_CUTOFF = 10.0


@dataclass(frozen=True)
class Superposition:
    """Proper rigid motion ``x -> rotation @ x + translation``."""

    rotation: np.ndarray
    translation: np.ndarray
    rmsd: float

    def apply(self, coords) -> np.ndarray:
        return np.asarray(coords, dtype=float) @ self.rotation.T + self.translation


@dataclass(frozen=True)
class LddtConfig:
    inclusion_radius: float = 6.0
    thresholds: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)

    def __post_init__(self):
        if self.inclusion_radius <= 0:
            raise ValueError("inclusion_radius must be positive")
        th = tuple(float(t) for t in self.thresholds)
        if not th or any(t <= 0 for t in th) or any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError("thresholds must be positive and strictly increasing")
        object.__setattr__(self, "thresholds", th)


def _check_spread(x: np.ndarray, w: np.ndarray, label: str) -> None:
    centered = (x - np.average(x, axis=0, weights=w)) * np.sqrt(w)[:, None]
    s = np.linalg.svd(centered, compute_uv=False)
    if s[0] < 1e-8 or s[1] < 1e-6 * max(1.0, s[0]):
        raise DegenerateGeometryError(f"{label} points are coincident or collinear")


def kabsch(P, Q, weights=None) -> Superposition:
    """Optimal proper rotation and translation carrying ``Q`` onto ``P``.

    Minimises the (weighted) RMSD between ``P`` and ``rotation @ Q + translation``.
    A reflection is never returned: if the optimal orthogonal map would be
    improper, the sign of the smallest singular direction is flipped.

    Raises:
        DegenerateGeometryError: fewer than three points, or either set
            collinear/coincident.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape or P.ndim != 2 or P.shape[1] != 3:
        raise ValueError(f"point sets must both be (n, 3); got {P.shape} and {Q.shape}")
    if len(P) < 3:
        raise DegenerateGeometryError("need at least three point pairs")
    w = np.ones(len(P)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (len(P),) or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be nonnegative with positive sum")
    _check_spread(P, w, "target")
    _check_spread(Q, w, "mobile")

    pc = np.average(P, axis=0, weights=w)
    qc = np.average(Q, axis=0, weights=w)
    H = ((Q - qc) * w[:, None]).T @ (P - pc)
    U, _, Vt = np.linalg.svd(H)
    d = 1.0 if np.linalg.det(Vt.T @ U.T) > 0 else -1.0
    R = Vt.T @ np.diag([1.0, 1.0, d]) @ U.T
    t = pc - R @ qc
    resid = P - (Q @ R.T + t)
    rmsd = float(np.sqrt(np.sum(w * np.sum(resid * resid, axis=1)) / w.sum()))
    return Superposition(R, t, rmsd)


def binding_site(truth: ComplexStructure, cutoff: float = DEFAULT_SITE_CUTOFF, ligand_index: int = 0) -> frozenset[ResidueKey]:
    """Residues with any heavy atom strictly closer than ``cutoff`` to the ligand."""
    if not truth.ligands:
        raise ValueError("binding site needs a ligand")
    lig = truth.ligands[ligand_index].coords
    table = truth.protein
    if len(table) == 0:
        raise EmptySiteError("no protein atoms")
    d = np.linalg.norm(table.coords[:, None, :] - lig[None, :, :], axis=-1)
    near = d.min(axis=1) < cutoff
    keys = frozenset(table.residues[k].key for k in np.unique(table.residue_index[near]))
    if not keys:
        raise EmptySiteError(f"no residue within {cutoff} A of the ligand")
    return keys


@functools.lru_cache(maxsize=256)
def _automorphisms(graph: MolecularGraph, max_count: int):
    return automorphisms(graph, max_count)


def ligand_correspondences(truth_graph: MolecularGraph, pred_graph: MolecularGraph, max_count: int = DEFAULT_MAX_AUTOMORPHISMS) -> np.ndarray:
    """All truth->pred atom correspondences allowed by ligand symmetry.

    Row ``r`` maps truth atom ``i`` to pred atom ``out[r, i]``.
    """
    base = graphs_match(truth_graph, pred_graph)
    if base is None:
        raise TopologyError("predicted ligand graph does not match the reference")
    base = np.asarray(base, dtype=int)
    perms = np.asarray(_automorphisms(truth_graph, max_count).perms, dtype=int).reshape(-1, len(truth_graph))
    return base[perms]


def _rmsd_rows(ref: np.ndarray, mobile: np.ndarray, maps: np.ndarray) -> np.ndarray:
    diff = mobile[maps] - ref[None, :, :]
    return np.sqrt(np.mean(np.sum(diff * diff, axis=-1), axis=-1))


@dataclass(frozen=True)
class RmsdResult:
    rmsd: float
    naive_rmsd: float
    superposition: Superposition
    site: tuple[ResidueKey, ...]
    n_correspondences: int


def _site_pairs(truth: ComplexStructure, pred: ComplexStructure, site, site_atoms: str):
    P, Q = [], []
    missing = []
    for key in sorted(site):
        t_res = truth.residue_map[key]
        p_res = pred.residue_map.get(key)
        if site_atoms == "ca":
            t_atom = t_res.atom("CA")
            if t_atom is None:
                continue
            p_atom = p_res.atom("CA") if p_res is not None else None
            if p_atom is None:
                missing.append(str(key))
                continue
            P.append(t_atom.coords)
            Q.append(p_atom.coords)
        else:
            if p_res is None:
                missing.append(str(key))
                continue
            for t_atom in t_res.atoms:
                p_atom = p_res.atom(t_atom.name)
                if p_atom is not None:
                    P.append(t_atom.coords)
                    Q.append(p_atom.coords)
    if missing:
        raise CoverageError(f"prediction lacks binding-site residues/CA atoms: {', '.join(missing)}")
    return np.array(P, dtype=float).reshape(-1, 3), np.array(Q, dtype=float).reshape(-1, 3)


def bisy_rmsd_detail(
    truth: ComplexStructure,
    pred: ComplexStructure,
    cutoff: float = DEFAULT_SITE_CUTOFF,
    site_atoms: str = "ca",
    max_automorphisms: int = DEFAULT_MAX_AUTOMORPHISMS,
) -> RmsdResult:
    site_atoms = site_atoms.lower()
    if site_atoms not in ("ca", "all"):
        raise ValueError("site_atoms must be 'ca' or 'all'")
    t_lig, p_lig = truth.ligand, pred.ligand
    maps = ligand_correspondences(t_lig.graph, p_lig.graph, max_automorphisms)
    site = binding_site(truth, cutoff)
    P, Q = _site_pairs(truth, pred, site, site_atoms)
    sup = kabsch(P, Q)
    moved = sup.apply(p_lig.coords)
    rows = _rmsd_rows(t_lig.coords, moved, maps)
    return RmsdResult(
        rmsd=float(rows.min()),
        naive_rmsd=float(rows[0]),
        superposition=sup,
        site=tuple(sorted(site)),
        n_correspondences=len(maps),
    )


def bisy_rmsd(truth: ComplexStructure, pred: ComplexStructure, cutoff: float = DEFAULT_SITE_CUTOFF, site_atoms: str = "ca") -> float:
    """Binding-site superposed, symmetry-corrected ligand RMSD in angstrom.

    The prediction is superposed once onto the reference using the binding
    site (C-alpha atoms by default); the ligand RMSD is then minimised over
    all graph automorphisms of the reference ligand.
    """
    return bisy_rmsd_detail(truth, pred, cutoff, site_atoms).rmsd


def lddt_pli(truth: ComplexStructure, pred: ComplexStructure, cfg: LddtConfig | None = None) -> float:
    """Interface lDDT between the ligand and protein heavy atoms.

    Pairs are ligand/protein atom pairs closer than the inclusion radius in
    the reference. A pair is preserved at threshold t when the predicted
    distance differs from the reference one by less than t; the score
    averages the preserved fraction over the thresholds and takes the best
    ligand symmetry. Protein atoms absent from the prediction count as not
    preserved.
    """
    cfg = cfg or LddtConfig()
    t_lig, p_lig = truth.ligand, pred.ligand
    maps = ligand_correspondences(t_lig.graph, p_lig.graph)

    t_prot = truth.protein
    d_true = np.linalg.norm(t_lig.coords[:, None, :] - t_prot.coords[None, :, :], axis=-1)
    cols = np.flatnonzero((d_true < cfg.inclusion_radius).any(axis=0))
    mask = d_true[:, cols] < cfg.inclusion_radius
    n_pairs = int(mask.sum())
    if n_pairs == 0:
        raise EmptySiteError("no ligand-protein pairs within the inclusion radius")
    d_true = d_true[:, cols]

    pred_xyz = np.full((len(cols), 3), np.nan)
    for out_row, col in enumerate(cols):
        res = t_prot.residues[t_prot.residue_index[col]]
        p_res = pred.residue_map.get(res.key)
        p_atom = p_res.atom(t_prot.names[col]) if p_res is not None else None
        if p_atom is not None:
            pred_xyz[out_row] = p_atom.coords
    d_pred_all = np.linalg.norm(p_lig.coords[:, None, :] - pred_xyz[None, :, :], axis=-1)

    best = -1
    for row in maps:
        delta = np.abs(d_pred_all[row] - d_true)
        kept = sum(int(np.count_nonzero((delta < t) & mask)) for t in cfg.thresholds)
        best = max(best, kept)
    return best / (n_pairs * len(cfg.thresholds))

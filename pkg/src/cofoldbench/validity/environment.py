"""Ligand-environment checks: distances to and volume overlap with surrounding groups."""

from __future__ import annotations

import math

import numpy as np

from cofoldbench import elements
from cofoldbench.structure import AtomTable, ComplexStructure

from .report import CheckConfig, CheckResult

GROUP_LABELS = {
    "protein": "protein",
    "organic": "organic_cofactors",
    "inorganic": "inorganic_cofactors",
    "water": "waters",
}


def _span_basis(vecs: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(vecs) built from the atom offsets in index order."""
    proj = offsets @ vecs @ vecs.T
    basis: list[np.ndarray] = []
    for v in proj:
        for b in basis:
            v = v - np.dot(v, b) * b
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            basis.append(v / norm)
        if len(basis) == vecs.shape[1]:
            break
    while len(basis) < vecs.shape[1]:
        # offsets do not span the subspace; complete with any orthonormal vector
        for v in vecs.T:
            for b in basis:
                v = v - np.dot(v, b) * b
            if np.linalg.norm(v) > 1e-6:
                basis.append(v / np.linalg.norm(v))
                break
    return np.stack(basis, axis=1)


def _ligand_frame(xyz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centroid and principal axes (columns) of the ligand atoms.

    Within a degenerate eigenspace (e.g. the ring plane of benzene) the axes
    are fixed by the atom positions in index order, so the frame moves
    rigidly with the ligand.
    """
    center = xyz.mean(axis=0)
    offsets = xyz - center
    cov = offsets.T @ offsets
    vals, vecs = np.linalg.eigh(cov)
    scale = max(vals[-1], 1e-12)
    groups = [[0]]
    for k in range(1, 3):
        if vals[k] - vals[k - 1] < 1e-6 * scale:
            groups[-1].append(k)
        else:
            groups.append([k])
    cols = []
    for grp in groups:
        sub = vecs[:, grp]
        cols.append(sub if len(grp) == 1 else _span_basis(sub, offsets))
    return center, np.concatenate(cols, axis=1)


def _paint(grid: np.ndarray, axes_pts: list[np.ndarray], spacing: float, centers: np.ndarray, radii: np.ndarray) -> None:
    """Accumulate (max) the fraction of each voxel covered by any of the spheres.

    Coverage of a voxel is approximated by a linear ramp of width ``spacing``
    in the signed distance of its centre to the sphere surface.
    """
    h = spacing
    lows = [a[0] for a in axes_pts]
    for c, r in zip(centers, radii):
        reach = r + h
        sl = []
        for ax in range(3):
            lo = max(0, int(math.floor((c[ax] - reach - lows[ax]) / h)))
            hi = min(len(axes_pts[ax]), int(math.ceil((c[ax] + reach - lows[ax]) / h)) + 1)
            if lo >= hi:
                break
            sl.append((lo, hi))
        else:
            xs = axes_pts[0][sl[0][0]:sl[0][1]] - c[0]
            ys = axes_pts[1][sl[1][0]:sl[1][1]] - c[1]
            zs = axes_pts[2][sl[2][0]:sl[2][1]] - c[2]
            dist = np.sqrt(xs[:, None, None] ** 2 + ys[None, :, None] ** 2 + zs[None, None, :] ** 2)
            cover = np.clip(0.5 + (r - dist) / h, 0.0, 1.0)
            block = grid[sl[0][0]:sl[0][1], sl[1][0]:sl[1][1], sl[2][0]:sl[2][1]]
            np.maximum(block, cover, out=block)


def volume_overlap_fraction(lig_xyz, lig_radii, other_xyz, other_radii, spacing: float = 0.25) -> float:
    """Fraction of the ligand's sphere-union volume that lies inside the other union.

    Volumes are integrated over a cubic grid laid out in the ligand's
    principal frame, with voxel centres at half-integer multiples of
    ``spacing`` from the centroid. The voxel set is symmetric under axis sign
    flips, so the estimate does not change under rigid motions of the whole
    complex. Partial voxel coverage is estimated from the distance of the
    voxel centre to the sphere surface.
    """
    lig_xyz = np.asarray(lig_xyz, dtype=float).reshape(-1, 3)
    other_xyz = np.asarray(other_xyz, dtype=float).reshape(-1, 3)
    lig_radii = np.asarray(lig_radii, dtype=float)
    other_radii = np.asarray(other_radii, dtype=float)
    if len(lig_xyz) == 0 or len(other_xyz) == 0:
        return 0.0
    center, axes = _ligand_frame(lig_xyz)
    lig_local = (lig_xyz - center) @ axes
    other_local = (other_xyz - center) @ axes

    extent = np.max(np.abs(lig_local) + lig_radii[:, None], axis=0) + spacing
    axes_pts = []
    for ax in range(3):
        k = int(math.ceil(extent[ax] / spacing))
        axes_pts.append((np.arange(-k, k) + 0.5) * spacing)

    lo = np.array([a[0] for a in axes_pts]) - spacing
    hi = np.array([a[-1] for a in axes_pts]) + spacing
    near = np.all((other_local + other_radii[:, None] >= lo) & (other_local - other_radii[:, None] <= hi), axis=1)
    if not near.any():
        return 0.0

    shape = tuple(len(a) for a in axes_pts)
    lig_grid = np.zeros(shape)
    other_grid = np.zeros(shape)
    _paint(lig_grid, axes_pts, spacing, lig_local, lig_radii)
    _paint(other_grid, axes_pts, spacing, other_local[near], other_radii[near])
    lig_volume = math.fsum(lig_grid.ravel())
    if lig_volume == 0:
        return 0.0
    return math.fsum(np.minimum(lig_grid, other_grid).ravel()) / lig_volume


def _radii(symbols) -> np.ndarray:
    return np.array([elements.vdw_radius(s) for s in symbols], dtype=float)


def _min_distance_check(lig_xyz, lig_r, table: AtomTable, factor: float) -> CheckResult:
    if len(table) == 0:
        return CheckResult(True, None, "group absent")
    d = np.linalg.norm(lig_xyz[:, None, :] - table.coords[None, :, :], axis=-1)
    ratio = d / (lig_r[:, None] + _radii(table.elements)[None, :])
    worst = float(ratio.min())
    n_bad = int(np.count_nonzero(ratio < factor))
    return CheckResult(n_bad == 0, worst, f"{n_bad} pair(s) closer than {factor:g} x vdW sum")


def check_environment(pred: ComplexStructure, cfg: CheckConfig | None = None, ligand_index: int = 0) -> dict[str, CheckResult]:
    cfg = cfg or CheckConfig()
    lig = pred.ligands[ligand_index]
    lig_xyz = lig.coords
    lig_r = _radii(lig.elements)
    tables = {
        "protein": pred.protein,
        "organic": pred.group_table("organic"),
        "inorganic": pred.group_table("inorganic"),
        "water": pred.group_table("water"),
    }
    out: dict[str, CheckResult] = {}

    prot = tables["protein"]
    if len(prot) == 0:
        out["protein-ligand_maximum_distance"] = CheckResult(False, None, "no protein atoms")
    else:
        dmin = float(np.min(np.linalg.norm(lig_xyz[:, None, :] - prot.coords[None, :, :], axis=-1)))
        out["protein-ligand_maximum_distance"] = CheckResult(
            dmin <= cfg.max_lig_prot_dist, dmin, f"closest protein atom at {dmin:.2f} A"
        )

    for group, label in GROUP_LABELS.items():
        out[f"minimum_distance_to_{label}"] = _min_distance_check(lig_xyz, lig_r, tables[group], cfg.inter_vdw_factor)

    for group, label in GROUP_LABELS.items():
        table = tables[group]
        if len(table) == 0:
            out[f"volume_overlap_with_{label}"] = CheckResult(True, None, "group absent")
            continue
        frac = volume_overlap_fraction(
            lig_xyz,
            lig_r * cfg.volume_vdw_scale,
            table.coords,
            _radii(table.elements) * cfg.volume_vdw_scale,
            cfg.grid_spacing,
        )
        out[f"volume_overlap_with_{label}"] = CheckResult(
            frac <= cfg.volume_overlap_max, frac, f"{frac:.3f} of ligand volume overlapped"
        )
    return out

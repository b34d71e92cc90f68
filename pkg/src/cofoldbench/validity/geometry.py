"""Intramolecular geometry checks on a single ligand pose."""

from __future__ import annotations

import math

import numpy as np

from cofoldbench import elements
from cofoldbench.molgraph import AROMATIC, MolecularGraph
from cofoldbench.molgraph.rings import aromatic_rings

from .report import CheckConfig, CheckResult

SP3 = 109.47
SP2 = 120.0
SP = 180.0

_BOND_K = 300.0
_ANGLE_K = 60.0
_LJ_EPS = 0.1


def ideal_angle(g: MolecularGraph, center: int, a: int, b: int) -> float:
    """Reference angle a-center-b from hybridisation and small-ring membership."""
    if g.bond_order(a, b) is not None:
        return 60.0
    if (set(g.neighbors[a]) & set(g.neighbors[b])) - {center}:
        return 90.0
    orders = [g.bond_order(center, j) for j in g.neighbors[center]]
    if orders.count(3) or orders.count(2) >= 2:
        return SP
    if 2 in orders or AROMATIC in orders:
        return SP2
    return SP3


def angle_triples(g: MolecularGraph):
    """(a, center, b) for every pair of neighbours of atoms with degree 2..4."""
    for c in range(len(g)):
        nbrs = g.neighbors[c]
        if not 2 <= len(nbrs) <= 4:
            continue
        for x in range(len(nbrs)):
            for y in range(x + 1, len(nbrs)):
                yield nbrs[x], c, nbrs[y]


def _angle(coords, a, c, b) -> float:
    u = coords[a] - coords[c]
    v = coords[b] - coords[c]
    cosine = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
    return math.degrees(math.acos(float(np.clip(cosine, -1.0, 1.0))))


def plane_deviation(points) -> float:
    """Largest distance of ``points`` from their least-squares plane."""
    pts = np.asarray(points, dtype=float)
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered)
    return float(np.max(np.abs(centered @ vt[-1])))


def nonbonded_pairs(g: MolecularGraph, min_sep: int):
    topo = g.topological_distances
    n = len(g)
    for i in range(n):
        row = topo[i]
        for j in range(i + 1, n):
            if row[j] < 0 or row[j] >= min_sep:
                yield i, j


def ideal_bond_length(g: MolecularGraph, i: int, j: int) -> float:
    order = g.bond_order(i, j)
    n = 1.5 if order == AROMATIC else order
    base = elements.covalent_radius(g.atoms[i].element) + elements.covalent_radius(g.atoms[j].element)
    return base - 0.71 * math.log10(n)


def strain_energy(g: MolecularGraph, coords, min_sep: int = 4) -> float:
    """Harmonic bonds and angles plus a 12-6 term shifted to be nonnegative.

    Bond references follow Pauling's bond-order relation on covalent radii;
    angle references come from :func:`ideal_angle`. Units are arbitrary but
    consistent, so only ratios between conformers are meaningful.
    """
    xyz = np.asarray(coords, dtype=float)
    energy = 0.0
    for b in g.bonds:
        d = float(np.linalg.norm(xyz[b.i] - xyz[b.j]))
        energy += _BOND_K * (d - ideal_bond_length(g, b.i, b.j)) ** 2
    for a, c, b in angle_triples(g):
        delta = math.radians(_angle(xyz, a, c, b) - ideal_angle(g, c, a, b))
        energy += _ANGLE_K * delta * delta
    for i, j in nonbonded_pairs(g, min_sep):
        r = max(float(np.linalg.norm(xyz[i] - xyz[j])), 0.1)
        rmin = elements.vdw_radius(g.atoms[i].element) + elements.vdw_radius(g.atoms[j].element)
        s6 = (rmin / r) ** 6
        energy += _LJ_EPS * (s6 * s6 - 2.0 * s6 + 1.0)
    return energy


def _double_bonds_to_flatten(g: MolecularGraph):
    for b in g.bonds:
        if b.order != 2:
            continue
        ends = (b.i, b.j)
        if any(g.atoms[x].element not in ("C", "N") or g.degree(x) > 3 for x in ends):
            continue
        if g.degree(b.i) < 2 and g.degree(b.j) < 2:
            continue
        yield b


def check_geometry(
    graph: MolecularGraph,
    coords,
    cfg: CheckConfig | None = None,
    reference_coords=None,
) -> dict[str, CheckResult]:
    cfg = cfg or CheckConfig()
    xyz = np.asarray(coords, dtype=float)
    if xyz.shape != (len(graph), 3):
        raise ValueError("coordinate count does not match the graph")
    out: dict[str, CheckResult] = {}

    worst, n_bad = 0.0, 0
    for b in graph.bonds:
        ref = elements.covalent_radius(graph.atoms[b.i].element) + elements.covalent_radius(graph.atoms[b.j].element)
        rel = float(np.linalg.norm(xyz[b.i] - xyz[b.j])) / ref
        dev = abs(rel - 1.0)
        worst = max(worst, dev)
        if dev > cfg.bond_len_rel_tol:
            n_bad += 1
    out["bond_lengths"] = CheckResult(
        n_bad == 0, worst, f"{n_bad}/{len(graph.bonds)} bonds outside covalent-radius band"
    )

    worst, n_bad, n_ang = 0.0, 0, 0
    skipped = sum(1 for c in range(len(graph)) if graph.degree(c) > 4)
    for a, c, b in angle_triples(graph):
        ideal = ideal_angle(graph, c, a, b)
        dev = abs(_angle(xyz, a, c, b) - ideal) / ideal
        worst = max(worst, dev)
        n_ang += 1
        if dev > cfg.angle_rel_tol:
            n_bad += 1
    detail = f"{n_bad}/{n_ang} angles outside hybridisation band"
    if skipped:
        detail += f"; {skipped} hypervalent centre(s) skipped"
    out["bond_angles"] = CheckResult(n_bad == 0, worst, detail)

    worst_ratio, n_clash, n_pairs = math.inf, 0, 0
    for i, j in nonbonded_pairs(graph, cfg.clash_min_bond_separation):
        limit = elements.vdw_radius(graph.atoms[i].element) + elements.vdw_radius(graph.atoms[j].element)
        ratio = float(np.linalg.norm(xyz[i] - xyz[j])) / limit
        worst_ratio = min(worst_ratio, ratio)
        n_pairs += 1
        if ratio < cfg.clash_vdw_factor:
            n_clash += 1
    out["internal_steric_clash"] = CheckResult(
        n_clash == 0,
        None if n_pairs == 0 else worst_ratio,
        f"{n_clash}/{n_pairs} nonbonded pairs clash",
    )

    rings = aromatic_rings(graph)
    dev = max((plane_deviation(xyz[list(r)]) for r in rings), default=0.0)
    out["aromatic_ring_flatness"] = CheckResult(
        dev <= cfg.flatness_tol, dev if rings else None, f"{len(rings)} aromatic ring(s)"
    )

    groups = []
    for b in _double_bonds_to_flatten(graph):
        groups.append(sorted({b.i, b.j, *graph.neighbors[b.i], *graph.neighbors[b.j]}))
    dev = max((plane_deviation(xyz[grp]) for grp in groups if len(grp) >= 4), default=0.0)
    out["double_bond_flatness"] = CheckResult(
        dev <= cfg.flatness_tol, dev if groups else None, f"{len(groups)} C/N double bond(s)"
    )

    if reference_coords is None:
        out["internal_energy"] = CheckResult(True, None, "skipped: no reference conformer")
    else:
        e_pose = strain_energy(graph, xyz, cfg.clash_min_bond_separation)
        e_ref = strain_energy(graph, reference_coords, cfg.clash_min_bond_separation)
        ratio = e_pose / max(e_ref, cfg.strain_floor)
        out["internal_energy"] = CheckResult(
            ratio <= cfg.strain_ratio_max, ratio, f"strain {e_pose:.3g} vs reference {e_ref:.3g}"
        )
    return out

"""Stereo perception from coordinates.

Tetrahedral parity is the sign of the triple product of the vectors from the
centre to its three lowest-indexed heavy neighbours. A double bond is 'cis'
when the dihedral between the lowest-indexed heavy neighbour on each end is
below 90 degrees and 'trans' otherwise.
"""

from __future__ import annotations

import numpy as np

from .graph import Atom, Bond, MolecularGraph
from .iso import refine_colors
from .rings import ring_membership

_CENTER_ELEMENTS = {"C", "Si", "P", "S", "N", "Ge"}
_PLANAR_EPS = 1e-3


def signed_volume(coords, center: int, refs) -> float:
    c = np.asarray(coords[center], dtype=float)
    m = np.array([np.asarray(coords[r], dtype=float) - c for r in refs[:3]])
    return float(np.linalg.det(m))


def dihedral(p0, p1, p2, p3) -> float:
    """Dihedral angle in degrees, in (-180, 180]."""
    p0, p1, p2, p3 = (np.asarray(p, dtype=float) for p in (p0, p1, p2, p3))
    b0 = p0 - p1
    b1 = p2 - p1
    b2 = p3 - p2
    b1n = b1 / np.linalg.norm(b1)
    v = b0 - np.dot(b0, b1n) * b1n
    w = b2 - np.dot(b2, b1n) * b1n
    x = np.dot(v, w)
    y = np.dot(np.cross(b1n, v), w)
    return float(np.degrees(np.arctan2(y, x)))


def stereocenter_candidates(g: MolecularGraph) -> list[int]:
    """Atoms whose substituents are pairwise distinguishable and tetrahedral."""
    colors = refine_colors(g)[0]
    out = []
    for i, atom in enumerate(g.atoms):
        nbrs = g.neighbors[i]
        if atom.element not in _CENTER_ELEMENTS or len(nbrs) < 3:
            continue
        if any(g.bond_order(i, j) != 1 for j in nbrs):
            continue
        n_h = g.total_hydrogens(i)
        if len(nbrs) + n_h != 4:
            continue
        if atom.element == "N" and atom.charge <= 0:
            continue  # pyramidal inversion
        nbr_colors = [colors[j] for j in nbrs]
        if len(set(nbr_colors)) != len(nbr_colors):
            continue
        out.append(i)
    return out


def stereo_double_bond_candidates(g: MolecularGraph) -> list[int]:
    """Indices into ``g.bonds`` of double bonds that can carry cis/trans."""
    colors = refine_colors(g)[0]
    small_ring = {k for k, size in ring_membership(g).items() if size < 8}
    out = []
    for k, b in enumerate(g.bonds):
        if b.order != 2 or (min(b.i, b.j), max(b.i, b.j)) in small_ring:
            continue
        ok = True
        for end, other in ((b.i, b.j), (b.j, b.i)):
            subs = [x for x in g.neighbors[end] if x != other]
            if not subs:
                ok = False
            elif len(subs) == 2 and colors[subs[0]] == colors[subs[1]]:
                ok = False
            elif len(subs) == 1 and g.total_hydrogens(end) > 1:
                ok = False
        if ok:
            out.append(k)
    return out


def tetrahedral_parity(g: MolecularGraph, coords, center: int) -> int | None:
    refs = g.neighbors[center][:3]
    vol = signed_volume(coords, center, refs)
    if abs(vol) < _PLANAR_EPS:
        return None
    return 1 if vol > 0 else -1


def double_bond_config(g: MolecularGraph, coords, i: int, j: int) -> str | None:
    ri = min(x for x in g.neighbors[i] if x != j)
    rj = min(x for x in g.neighbors[j] if x != i)
    angle = dihedral(coords[ri], coords[i], coords[j], coords[rj])
    return "cis" if abs(angle) < 90.0 else "trans"


def assign_stereo(g: MolecularGraph, coords, centers=None) -> MolecularGraph:
    """Return ``g`` with parities and double-bond configurations read from ``coords``.

    ``centers`` restricts which atoms receive a parity; by default every
    perceived stereocentre does.
    """
    if centers is None:
        centers = stereocenter_candidates(g)
    centers = set(centers)
    atoms = []
    for i, a in enumerate(g.atoms):
        parity = tetrahedral_parity(g, coords, i) if i in centers and g.degree(i) >= 3 else None
        atoms.append(Atom(a.element, a.charge, parity, a.explicit_h))
    stereo_bonds = set(stereo_double_bond_candidates(g))
    bonds = []
    for k, b in enumerate(g.bonds):
        stereo = double_bond_config(g, coords, b.i, b.j) if k in stereo_bonds else None
        bonds.append(Bond(b.i, b.j, b.order, stereo))
    return MolecularGraph(tuple(atoms), tuple(bonds), g.multi_fragment, g.name)

"""Minimum cycle basis (smallest set of smallest rings)."""

from __future__ import annotations

from .graph import AROMATIC, Atom, Bond, MolecularGraph


def _bfs_tree(g: MolecularGraph, root: int) -> tuple[list[int], list[int]]:
    n = len(g)
    parent = [-1] * n
    depth = [-1] * n
    depth[root] = 0
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.neighbors[u]:
                if depth[v] < 0:
                    depth[v] = depth[u] + 1
                    parent[v] = u
                    nxt.append(v)
        frontier = nxt
    return parent, depth


def _path_to_root(parent: list[int], v: int) -> list[int]:
    path = [v]
    while parent[path[-1]] >= 0:
        path.append(parent[path[-1]])
    return path


def _canonical_cycle(cycle: list[int]) -> tuple[int, ...]:
    """Rotate/reflect so the cycle starts at its smallest atom, smaller neighbour next."""
    k = cycle.index(min(cycle))
    rotated = cycle[k:] + cycle[:k]
    if len(rotated) > 2 and rotated[-1] < rotated[1]:
        rotated = [rotated[0]] + rotated[:0:-1]
    return tuple(rotated)


def perceive_rings(g: MolecularGraph) -> list[tuple[int, ...]]:
    """Return a minimum cycle basis as ordered atom sequences.

    Horton candidates (shortest path u..x + edge x-y + shortest path y..u)
    are sorted by length and added greedily while they stay linearly
    independent over GF(2) in the edge space.
    """
    n = len(g)
    edges = sorted((min(b.i, b.j), max(b.i, b.j)) for b in g.bonds)
    n_cycles = len(edges) - n + len(g.components)
    if n_cycles <= 0:
        return []
    edge_index = {e: k for k, e in enumerate(edges)}

    candidates = {}
    for root in range(n):
        parent, depth = _bfs_tree(g, root)
        if max(depth) < 0:
            continue
        for x, y in edges:
            if depth[x] < 0 or depth[y] < 0:
                continue
            if parent[x] == y or parent[y] == x:
                continue
            px = _path_to_root(parent, x)
            py = _path_to_root(parent, y)
            if set(px) & set(py) != {root}:
                continue
            cycle = list(reversed(px)) + py[:-1]
            canon = _canonical_cycle(cycle)
            candidates.setdefault(canon, None)

    def edge_mask(cycle: tuple[int, ...]) -> int:
        mask = 0
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            mask |= 1 << edge_index[(min(a, b), max(a, b))]
        return mask

    basis: list[tuple[int, ...]] = []
    pivots: dict[int, int] = {}
    for cycle in sorted(candidates, key=lambda c: (len(c), c)):
        vec = edge_mask(cycle)
        while vec:
            top = vec.bit_length() - 1
            if top not in pivots:
                pivots[top] = vec
                basis.append(cycle)
                break
            vec ^= pivots[top]
        if len(basis) == n_cycles:
            break
    return basis


def ring_bonds(ring: tuple[int, ...]) -> list[tuple[int, int]]:
    return [(a, b) for a, b in zip(ring, ring[1:] + ring[:1])]


def aromatic_rings(g: MolecularGraph) -> list[tuple[int, ...]]:
    """Rings of the minimum basis whose bonds are all flagged aromatic."""
    return [
        ring for ring in perceive_rings(g)
        if all(g.bond_order(a, b) == AROMATIC for a, b in ring_bonds(ring))
    ]


_LONE_PAIR_DONORS = {"N", "O", "S", "Se", "P"}


def _pi_electrons(g: MolecularGraph, atom: int, ring_bond_keys: set) -> int | None:
    """Electrons ``atom`` donates to a ring's pi system, or None if it breaks conjugation."""
    a = g.atoms[atom]
    if g.degree(atom) + a.explicit_h > 3 and not (a.element == "N" and a.charge > 0):
        return None
    doubles = []
    for j in g.neighbors[atom]:
        order = g.bond_order(atom, j)
        if order == AROMATIC:
            return 1
        if order == 2:
            doubles.append(j)
        elif order == 3:
            return None
    if len(doubles) == 1:
        key = (min(atom, doubles[0]), max(atom, doubles[0]))
        return 1 if key in ring_bond_keys else None
    if doubles:
        return None
    if a.element in _LONE_PAIR_DONORS and a.charge <= 0:
        return 2
    if a.element == "C" and a.charge == -1:
        return 2
    return None


def aromatize(g: MolecularGraph) -> MolecularGraph:
    """Flag bonds of Hueckel (4n+2) basis rings as aromatic.

    Kekule and aromatic encodings of the same molecule then yield the same
    graph. Each atom's hydrogen count is pinned first so that the formula
    does not depend on the input encoding.
    """
    rings = perceive_rings(g)
    if not rings:
        return g
    ring_keys = {(min(a, b), max(a, b)) for r in rings for a, b in ring_bonds(r)}
    to_flag = set()
    for ring in rings:
        pis = [_pi_electrons(g, x, ring_keys) for x in ring]
        if any(p is None for p in pis):
            continue
        total = sum(pis)
        if total % 4 == 2:
            to_flag.update((min(a, b), max(a, b)) for a, b in ring_bonds(ring))
    to_flag = {k for k in to_flag if g.bond_order(*k) != AROMATIC}
    if not to_flag:
        return g
    touched = {x for k in to_flag for x in k}
    atoms = tuple(
        Atom(a.element, a.charge, a.parity, g.total_hydrogens(i)) if i in touched else a
        for i, a in enumerate(g.atoms)
    )
    bonds = tuple(
        Bond(b.i, b.j, AROMATIC, None) if (min(b.i, b.j), max(b.i, b.j)) in to_flag else b
        for b in g.bonds
    )
    return MolecularGraph(atoms, bonds, g.multi_fragment, g.name)


def ring_membership(g: MolecularGraph) -> dict[tuple[int, int], int]:
    """Smallest basis-ring size each ring bond belongs to."""
    out: dict[tuple[int, int], int] = {}
    for ring in perceive_rings(g):
        for a, b in ring_bonds(ring):
            key = (min(a, b), max(a, b))
            out[key] = min(out.get(key, len(ring)), len(ring))
    return out

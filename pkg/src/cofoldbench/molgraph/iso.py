"""Graph isomorphism and automorphism search.

Atoms are first partitioned by iterated neighbourhood refinement (element and
charge, then the multiset of ``(bond order, neighbour colour)``), and the
backtracking search only ever pairs atoms of equal colour. Atoms are visited
in BFS order so that every non-root atom is matched among the neighbours of
its parent's image.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterator, NamedTuple

from .graph import MolecularGraph

DEFAULT_MAX_AUTOMORPHISMS = 10_000


class AutomorphismSet(NamedTuple):
    perms: list[tuple[int, ...]]
    truncated: bool

    def __len__(self) -> int:
        return len(self.perms)

    def __iter__(self):
        return iter(self.perms)


def refine_colors(*graphs: MolecularGraph) -> list[list[int]]:
    """Stable colouring of one or more graphs over a shared palette.

    Colours are comparable across the graphs passed in the same call, which is
    what makes them usable for matching two different graphs.
    """
    keys = [[(a.element, a.charge) for a in g.atoms] for g in graphs]
    colors = _relabel(keys)
    n_classes = len({c for cs in colors for c in cs})
    while True:
        keys = []
        for g, cs in zip(graphs, colors):
            keys.append([
                (cs[u], tuple(sorted((g.bond_order(u, v), cs[v]) for v in g.neighbors[u])))
                for u in range(len(g))
            ])
        new_colors = _relabel(keys)
        new_n = len({c for cs in new_colors for c in cs})
        colors = new_colors
        if new_n == n_classes:
            return colors
        n_classes = new_n


def _relabel(keys: list[list]) -> list[list[int]]:
    palette = {k: i for i, k in enumerate(sorted({k for ks in keys for k in ks}))}
    return [[palette[k] for k in ks] for ks in keys]


def _search_order(g: MolecularGraph, colors: list[int]) -> list[tuple[int, int | None]]:
    """BFS visiting order as ``(atom, parent)`` pairs, roots on rare colours."""
    class_size = Counter(colors)
    seen = [False] * len(g)
    order = []
    remaining = sorted(range(len(g)), key=lambda u: (class_size[colors[u]], u))
    for root in remaining:
        if seen[root]:
            continue
        seen[root] = True
        queue = [(root, None)]
        head = 0
        while head < len(queue):
            u, parent = queue[head]
            head += 1
            order.append((u, parent))
            for v in sorted(g.neighbors[u], key=lambda v: (class_size[colors[v]], v)):
                if not seen[v]:
                    seen[v] = True
                    queue.append((v, u))
    return order


def iter_isomorphisms(
    a: MolecularGraph,
    b: MolecularGraph,
    colors: tuple[list[int], list[int]] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Yield every element/charge/bond-order preserving bijection a -> b.

    Each mapping is a tuple ``m`` with ``m[i]`` the atom of ``b`` that atom
    ``i`` of ``a`` maps to.
    """
    if len(a) != len(b) or len(a.bonds) != len(b.bonds):
        return
    if colors is None:
        ca, cb = refine_colors(a, b)
    else:
        ca, cb = colors
    if Counter(ca) != Counter(cb):
        return
    n = len(a)
    if n == 0:
        yield ()
        return

    by_color: dict[int, list[int]] = {}
    for v, c in enumerate(cb):
        by_color.setdefault(c, []).append(v)

    order = _search_order(a, ca)
    mapping = [-1] * n
    used = [False] * n

    def feasible(u: int, v: int) -> bool:
        mapped_u = 0
        for w in a.neighbors[u]:
            mw = mapping[w]
            if mw < 0:
                continue
            mapped_u += 1
            if b.bond_order(v, mw) != a.bond_order(u, w):
                return False
        mapped_v = 0
        for x in b.neighbors[v]:
            if used[x]:
                mapped_v += 1
        return mapped_u == mapped_v

    def extend(k: int) -> Iterator[tuple[int, ...]]:
        if k == n:
            yield tuple(mapping)
            return
        u, parent = order[k]
        if parent is None:
            pool = by_color[ca[u]]
        else:
            pool = b.neighbors[mapping[parent]]
        for v in pool:
            if used[v] or cb[v] != ca[u]:
                continue
            if not feasible(u, v):
                continue
            mapping[u] = v
            used[v] = True
            yield from extend(k + 1)
            mapping[u] = -1
            used[v] = False

    yield from extend(0)


def automorphisms(g: MolecularGraph, max_count: int = DEFAULT_MAX_AUTOMORPHISMS) -> AutomorphismSet:
    """Enumerate the automorphism group of ``g``, identity first.

    At most ``max_count`` permutations are returned; ``truncated`` reports
    whether the enumeration stopped early.
    """
    if max_count <= 0:
        raise ValueError("max_count must be positive")
    identity = tuple(range(len(g)))
    colors = refine_colors(g)[0]
    perms = [identity]
    truncated = False
    for perm in iter_isomorphisms(g, g, (colors, colors)):
        if perm == identity:
            continue
        if len(perms) >= max_count:
            truncated = True
            break
        perms.append(perm)
    return AutomorphismSet(perms, truncated)


def graphs_match(a: MolecularGraph, b: MolecularGraph) -> tuple[int, ...] | None:
    """First isomorphism from ``a`` onto ``b``, or None if the graphs differ."""
    return next(iter_isomorphisms(a, b), None)


def is_automorphism(g: MolecularGraph, perm) -> bool:
    """Check that ``perm`` preserves atom labels and the bond table of ``g``."""
    n = len(g)
    if sorted(perm) != list(range(n)):
        return False
    for i in range(n):
        ai, aj = g.atoms[i], g.atoms[perm[i]]
        if (ai.element, ai.charge) != (aj.element, aj.charge):
            return False
    for bond in g.bonds:
        if g.bond_order(perm[bond.i], perm[bond.j]) != bond.order:
            return False
    return True

"""Immutable heavy-atom molecular graph."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

from cofoldbench import elements

AROMATIC = 4
"""Bond order code for aromatic bonds (same code as the MDL bond block)."""

BOND_ORDERS = (1, 2, 3, AROMATIC)


@dataclass(frozen=True)
class Atom:
    element: str
    charge: int = 0
    parity: int | None = None
    """Tetrahedral parity, +1/-1, or None when the atom is not a stereocentre.

    The sign is that of the triple product of the vectors from the atom to
    its three lowest-indexed heavy neighbours.
    """
    explicit_h: int = 0
    """Hydrogens bonded to this atom in the source file (dropped from the graph)."""


@dataclass(frozen=True)
class Bond:
    i: int
    j: int
    order: int = 1
    stereo: str | None = None
    """'cis' or 'trans' for stereo double bonds.

    Refers to the lowest-indexed heavy neighbour on each end of the bond.
    """


@dataclass(frozen=True)
class MolecularGraph:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...] = ()
    multi_fragment: bool = False
    name: str = field(default="", compare=False)

    def __post_init__(self):
        n = len(self.atoms)
        seen = set()
        for b in self.bonds:
            if not (0 <= b.i < n and 0 <= b.j < n):
                raise ValueError(f"bond ({b.i}, {b.j}) references a missing atom")
            if b.i == b.j:
                raise ValueError(f"self-loop on atom {b.i}")
            key = (min(b.i, b.j), max(b.i, b.j))
            if key in seen:
                raise ValueError(f"duplicate bond {key}")
            if b.order not in BOND_ORDERS:
                raise ValueError(f"unsupported bond order {b.order}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.atoms)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in self.atoms]
        for b in self.bonds:
            adj[b.i].append(b.j)
            adj[b.j].append(b.i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def _orders(self) -> dict[tuple[int, int], int]:
        out = {}
        for b in self.bonds:
            out[(b.i, b.j)] = b.order
            out[(b.j, b.i)] = b.order
        return out

    def bond_order(self, i: int, j: int) -> int | None:
        return self._orders.get((i, j))

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        seen = [False] * len(self.atoms)
        comps = []
        for start in range(len(self.atoms)):
            if seen[start]:
                continue
            stack, comp = [start], []
            seen[start] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self.neighbors[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(tuple(sorted(comp)))
        return tuple(comps)

    def is_connected(self) -> bool:
        return len(self.components) <= 1

    @cached_property
    def topological_distances(self) -> tuple[tuple[int, ...], ...]:
        """All-pairs bond-path lengths; unreachable pairs are -1."""
        n = len(self.atoms)
        rows = []
        for s in range(n):
            dist = [-1] * n
            dist[s] = 0
            frontier = [s]
            while frontier:
                nxt = []
                for u in frontier:
                    for v in self.neighbors[u]:
                        if dist[v] < 0:
                            dist[v] = dist[u] + 1
                            nxt.append(v)
                frontier = nxt
            rows.append(tuple(dist))
        return tuple(rows)

    def explicit_valence(self, i: int) -> float:
        """Sum of bond orders (aromatic counts 1.5) plus explicit hydrogens."""
        total = float(self.atoms[i].explicit_h)
        for j in self.neighbors[i]:
            order = self._orders[(i, j)]
            total += 1.5 if order == AROMATIC else order
        return total

    def implicit_hydrogens(self, i: int) -> int:
        """Hydrogens needed to reach the smallest allowed valence.

        Aromatic bonds count 1.5 and the heavy-atom valence is floored, so a
        fused aromatic carbon (4.5) gets no hydrogen.
        """
        atom = self.atoms[i]
        allowed = elements.allowed_valences(atom.element, atom.charge)
        if not allowed:
            return 0
        used = math.floor(self.explicit_valence(i) + 1e-9)
        for v in allowed:
            if v >= used:
                return v - used
        return 0

    def total_hydrogens(self, i: int) -> int:
        return self.atoms[i].explicit_h + self.implicit_hydrogens(i)

    def formula(self) -> str:
        """Hill-order molecular formula including implicit hydrogens."""
        counts = Counter(a.element for a in self.atoms)
        n_h = sum(self.total_hydrogens(i) for i in range(len(self.atoms)))
        if n_h:
            counts["H"] += n_h
        keys = sorted(counts)
        if "C" in counts:
            keys = ["C"] + (["H"] if "H" in counts else []) + [
                k for k in keys if k not in ("C", "H")
            ]
        return "".join(f"{k}{counts[k] if counts[k] > 1 else ''}" for k in keys)

    def net_charge(self) -> int:
        return sum(a.charge for a in self.atoms)

    def with_atoms(self, atoms) -> "MolecularGraph":
        return MolecularGraph(tuple(atoms), self.bonds, self.multi_fragment, self.name)

    def with_bonds(self, bonds) -> "MolecularGraph":
        return MolecularGraph(self.atoms, tuple(bonds), self.multi_fragment, self.name)

    def permuted(self, order) -> "MolecularGraph":
        """Graph with atoms renumbered so new atom ``k`` is old atom ``order[k]``.

        Stereo annotations are dropped because they depend on atom indices.
        """
        inverse = {old: new for new, old in enumerate(order)}
        atoms = [
            Atom(self.atoms[old].element, self.atoms[old].charge, None, self.atoms[old].explicit_h)
            for old in order
        ]
        bonds = [Bond(inverse[b.i], inverse[b.j], b.order) for b in self.bonds]
        return MolecularGraph(tuple(atoms), tuple(bonds), self.multi_fragment, self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "multi_fragment": self.multi_fragment,
            "atoms": [[a.element, a.charge, a.parity, a.explicit_h] for a in self.atoms],
            "bonds": [[b.i, b.j, b.order, b.stereo] for b in self.bonds],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MolecularGraph":
        return cls(
            atoms=tuple(Atom(e, c, p, h) for e, c, p, h in data["atoms"]),
            bonds=tuple(Bond(i, j, o, s) for i, j, o, s in data["bonds"]),
            multi_fragment=data.get("multi_fragment", False),
            name=data.get("name", ""),
        )


def build_graph(elements_seq, bonds, charges=None) -> MolecularGraph:
    """Small convenience constructor used by fixtures and tests.

    ``bonds`` is an iterable of ``(i, j)`` or ``(i, j, order)`` tuples.
    """
    charges = charges or [0] * len(elements_seq)
    atoms = tuple(Atom(e, c) for e, c in zip(elements_seq, charges))
    out = []
    for b in bonds:
        i, j = b[0], b[1]
        order = b[2] if len(b) > 2 else 1
        out.append(Bond(i, j, order))
    return MolecularGraph(atoms, tuple(out))

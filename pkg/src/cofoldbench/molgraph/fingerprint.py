"""ECFP-style circular fingerprints and Tanimoto similarity.

Atom identifiers start from ``(element, formal charge, heavy degree)`` and are
updated ``radius`` times from the sorted ``(bond order, neighbour id)`` list.
Every identifier is hashed with 64-bit FNV-1a over a canonical text encoding,
so bits are identical on every platform and for every atom ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import MolecularGraph

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK
    return h


def _hash_tuple(values) -> int:
    return fnv1a_64(repr(tuple(values)).encode("ascii"))


@dataclass(frozen=True)
class Fingerprint:
    on_bits: frozenset[int]
    nbits: int = 2048
    radius: int = 2

    def __len__(self) -> int:
        return self.nbits

    @property
    def popcount(self) -> int:
        return len(self.on_bits)

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.nbits, dtype=bool)
        out[sorted(self.on_bits)] = True
        return out

    @classmethod
    def from_bits(cls, bits, nbits: int = 2048, radius: int = 2) -> "Fingerprint":
        bits = frozenset(int(b) for b in bits)
        if any(b < 0 or b >= nbits for b in bits):
            raise ValueError("bit index out of range")
        return cls(bits, nbits, radius)


def atom_identifiers(g: MolecularGraph, radius: int) -> list[list[int]]:
    """Identifier of every atom at every iteration 0..radius."""
    ids = [
        _hash_tuple((a.element, a.charge, g.degree(i)))
        for i, a in enumerate(g.atoms)
    ]
    layers = [ids]
    for r in range(1, radius + 1):
        prev = layers[-1]
        layers.append([
            _hash_tuple((r, prev[u], *sorted((g.bond_order(u, v), prev[v]) for v in g.neighbors[u])))
            for u in range(len(g))
        ])
    return layers


def circular_fingerprint(g: MolecularGraph, radius: int = 2, nbits: int = 2048) -> Fingerprint:
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if nbits <= 0 or nbits & (nbits - 1):
        raise ValueError("nbits must be a power of two")
    bits = set()
    for layer in atom_identifiers(g, radius):
        bits.update(ident % nbits for ident in layer)
    return Fingerprint(frozenset(bits), nbits, radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a AND b| / |a OR b|; two empty fingerprints have similarity 1."""
    if a.nbits != b.nbits:
        raise ValueError(f"fingerprint widths differ: {a.nbits} vs {b.nbits}")
    union = len(a.on_bits | b.on_bits)
    if union == 0:
        return 1.0
    return len(a.on_bits & b.on_bits) / union

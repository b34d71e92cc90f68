"""Complex structure containers shared by parsers and metrics.

Everything here is immutable after construction. Coordinates of ligands are
kept as read-only ``float64`` arrays of shape ``(n_atoms, 3)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple

import numpy as np

from cofoldbench.molgraph import MolecularGraph

WATER_NAMES = frozenset({"HOH", "WAT", "H2O", "DOD", "D2O", "SOL"})

AMINO_ACIDS = frozenset({
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE",
    "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL",
    "SEC", "PYL", "MSE", "HSD", "HSE", "HSP", "HID", "HIE", "HIP", "CYX",
    "ASX", "GLX", "UNK",
})


class ResidueKey(NamedTuple):
    chain: str
    seq: int
    icode: str = ""

    def __str__(self) -> str:
        return f"{self.chain}:{self.seq}{self.icode}"

    @classmethod
    def parse(cls, text: str) -> "ResidueKey":
        """Parse ``"A:42"`` or ``"A:42B"``."""
        chain, _, rest = text.partition(":")
        digits = rest.rstrip("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz")
        return cls(chain, int(digits), rest[len(digits):])


@dataclass(frozen=True)
class AtomSite:
    name: str
    element: str
    coords: tuple[float, float, float]
    occupancy: float = 1.0
    is_hetero: bool = False


@dataclass(frozen=True)
class ResidueSite:
    chain_id: str
    seq_index: int
    insertion_code: str
    res_name: str
    atoms: tuple[AtomSite, ...]

    @property
    def key(self) -> ResidueKey:
        return ResidueKey(self.chain_id, self.seq_index, self.insertion_code)

    def atom(self, name: str) -> AtomSite | None:
        for a in self.atoms:
            if a.name == name:
                return a
        return None

    def coords(self) -> np.ndarray:
        return np.array([a.coords for a in self.atoms], dtype=float).reshape(-1, 3)


@dataclass(frozen=True)
class Chain:
    chain_id: str
    residues: tuple[ResidueSite, ...]


def _frozen_array(coords) -> np.ndarray:
    arr = np.array(coords, dtype=float).reshape(-1, 3)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ligand:
    graph: MolecularGraph
    coords: np.ndarray
    name: str = "LIG"

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen_array(self.coords))
        if len(self.coords) != len(self.graph):
            raise ValueError(
                f"ligand has {len(self.graph)} atoms but {len(self.coords)} coordinates"
            )
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("ligand coordinates must be finite")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ligand):
            return NotImplemented
        return (
            self.name == other.name
            and self.graph == other.graph
            and np.array_equal(self.coords, other.coords)
        )

    __hash__ = None

    @property
    def elements(self) -> list[str]:
        return [a.element for a in self.graph.atoms]


@dataclass(frozen=True)
class Cofactors:
    organic: tuple[ResidueSite, ...] = ()
    inorganic: tuple[ResidueSite, ...] = ()
    water: tuple[ResidueSite, ...] = ()

    def groups(self) -> dict[str, tuple[ResidueSite, ...]]:
        return {"organic": self.organic, "inorganic": self.inorganic, "water": self.water}


@dataclass(frozen=True)
class AtomTable:
    """Flat view of a set of residues for vectorised distance work."""

    coords: np.ndarray
    elements: tuple[str, ...]
    names: tuple[str, ...]
    residue_index: np.ndarray
    residues: tuple[ResidueSite, ...]

    def __len__(self) -> int:
        return len(self.elements)


def atom_table(residues) -> AtomTable:
    residues = tuple(residues)
    coords, elements, names, owner = [], [], [], []
    for k, res in enumerate(residues):
        for a in res.atoms:
            coords.append(a.coords)
            elements.append(a.element)
            names.append(a.name)
            owner.append(k)
    return AtomTable(
        coords=_frozen_array(coords),
        elements=tuple(elements),
        names=tuple(names),
        residue_index=np.array(owner, dtype=int),
        residues=residues,
    )


@dataclass(frozen=True)
class ComplexStructure:
    chains: tuple[Chain, ...]
    ligands: tuple[Ligand, ...] = ()
    cofactors: Cofactors = field(default_factory=Cofactors)

    def __post_init__(self):
        seen = set()
        for res in self.residues():
            if res.key in seen:
                raise ValueError(f"duplicate residue {res.key}")
            seen.add(res.key)

    def residues(self) -> Iterator[ResidueSite]:
        for chain in self.chains:
            yield from chain.residues

    @cached_property
    def residue_map(self) -> dict[ResidueKey, ResidueSite]:
        return {res.key: res for res in self.residues()}

    @cached_property
    def protein(self) -> AtomTable:
        return atom_table(self.residues())

    def group_table(self, group: str) -> AtomTable:
        return atom_table(self.cofactors.groups()[group])

    @property
    def ligand(self) -> Ligand:
        if not self.ligands:
            raise ValueError("structure has no ligand")
        return self.ligands[0]

    def with_ligand(self, ligand: Ligand, tol: float = 0.5) -> "ComplexStructure":
        """Attach ``ligand`` as the evaluated ligand.

        Hetero groups whose atoms all sit within ``tol`` of a ligand atom are
        copies of the ligand itself and are removed from the cofactor groups.
        """
        def is_copy(res: ResidueSite) -> bool:
            xyz = res.coords()
            if len(xyz) == 0 or len(ligand.coords) == 0:
                return False
            d = np.linalg.norm(xyz[:, None, :] - ligand.coords[None, :, :], axis=-1)
            return bool(np.all(d.min(axis=1) < tol))

        cof = Cofactors(
            organic=tuple(r for r in self.cofactors.organic if not is_copy(r)),
            inorganic=tuple(r for r in self.cofactors.inorganic if not is_copy(r)),
            water=self.cofactors.water,
        )
        return ComplexStructure(self.chains, (ligand,) + tuple(self.ligands), cof)

    def transformed(self, rotation, translation) -> "ComplexStructure":
        """Apply ``x -> rotation @ x + translation`` to every coordinate."""
        rot = np.asarray(rotation, dtype=float)
        shift = np.asarray(translation, dtype=float)

        def move_res(res: ResidueSite) -> ResidueSite:
            atoms = []
            for a in res.atoms:
                x = rot @ np.asarray(a.coords) + shift
                atoms.append(AtomSite(a.name, a.element, tuple(float(v) for v in x), a.occupancy, a.is_hetero))
            return ResidueSite(res.chain_id, res.seq_index, res.insertion_code, res.res_name, tuple(atoms))

        chains = tuple(Chain(c.chain_id, tuple(move_res(r) for r in c.residues)) for c in self.chains)
        ligands = tuple(
            Ligand(l.graph, l.coords @ rot.T + shift, l.name) for l in self.ligands
        )
        cof = Cofactors(*(tuple(move_res(r) for r in grp) for grp in self.cofactors.groups().values()))
        return ComplexStructure(chains, ligands, cof)


def _residue_to_dict(res: ResidueSite) -> dict:
    return {
        "chain": res.chain_id,
        "seq": res.seq_index,
        "icode": res.insertion_code,
        "name": res.res_name,
        "atoms": [
            [a.name, a.element, list(a.coords), a.occupancy, a.is_hetero] for a in res.atoms
        ],
    }


def _residue_from_dict(data: dict) -> ResidueSite:
    atoms = tuple(
        AtomSite(n, e, tuple(float(v) for v in xyz), float(occ), bool(het))
        for n, e, xyz, occ, het in data["atoms"]
    )
    return ResidueSite(data["chain"], int(data["seq"]), data["icode"], data["name"], atoms)


def to_canonical(structure: ComplexStructure) -> dict:
    """JSON-serialisable canonical form; floats are written with full precision."""
    return {
        "chains": [
            {"id": c.chain_id, "residues": [_residue_to_dict(r) for r in c.residues]}
            for c in structure.chains
        ],
        "ligands": [
            {"name": l.name, "graph": l.graph.to_dict(), "coords": l.coords.tolist()}
            for l in structure.ligands
        ],
        "cofactors": {
            group: [_residue_to_dict(r) for r in members]
            for group, members in structure.cofactors.groups().items()
        },
    }


def from_canonical(data: dict) -> ComplexStructure:
    chains = tuple(
        Chain(c["id"], tuple(_residue_from_dict(r) for r in c["residues"])) for c in data["chains"]
    )
    ligands = tuple(
        Ligand(MolecularGraph.from_dict(l["graph"]), np.array(l["coords"], dtype=float), l["name"])
        for l in data["ligands"]
    )
    cof = data["cofactors"]
    cofactors = Cofactors(
        organic=tuple(_residue_from_dict(r) for r in cof["organic"]),
        inorganic=tuple(_residue_from_dict(r) for r in cof["inorganic"]),
        water=tuple(_residue_from_dict(r) for r in cof["water"]),
    )
    return ComplexStructure(chains, ligands, cofactors)

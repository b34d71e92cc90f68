"""MDL molfile / SDF (V2000) reader.

Only the first record of an SDF stream is read. Hydrogens are removed from
the graph after parsing; each heavy atom remembers how many hydrogens it
carried in ``Atom.explicit_h``.
"""

from __future__ import annotations

import numpy as np

from cofoldbench import elements
from cofoldbench.errors import ParseError, UnknownElementError
from cofoldbench.molgraph import Atom, Bond, MolecularGraph, aromatize
from cofoldbench.molgraph.stereo import assign_stereo, stereocenter_candidates

# atom-block charge codes; 4 is a doublet radical and carries no charge
_CHARGE_CODES = {0: 0, 1: 3, 2: 2, 3: 1, 4: 0, 5: -1, 6: -2, 7: -3}
_WEDGE_UP = 1
_WEDGE_DOWN = 6


def _int_field(line: str, start: int, stop: int, lineno: int, what: str, default: int | None = None) -> int:
    raw = line[start:stop].strip()
    if not raw:
        if default is None:
            raise ParseError(f"missing {what}", lineno)
        return default
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"bad {what} {raw!r}", lineno) from None


def parse_ligand(data: bytes | str, format: str = "sdf") -> tuple[MolecularGraph, np.ndarray]:
    """Parse a V2000 connection table into a heavy-atom graph and coordinates.

    Hueckel rings given in Kekule form are converted to aromatic bonds.

    Stereo annotations are derived from geometry. For 3D input every
    perceived stereocentre gets a parity; for flat (2D) input only atoms
    with wedge or hash bonds do, using the wedge direction as pseudo depth.

    Raises:
        ParseError: header counts disagree with the blocks, bad indices, or
            an unsupported (V3000) table.
        UnknownElementError: an atom symbol is not a chemical element.
    """
    if format.lower() not in ("sdf", "mol"):
        raise ValueError(f"unsupported ligand format {format!r}")
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    lines = text.splitlines()
    for k, line in enumerate(lines):
        if line.startswith("$$$$"):
            lines = lines[:k]
            break
    if len(lines) < 4:
        raise ParseError("molfile shorter than its header", len(lines) or None)

    counts = lines[3]
    if "V3000" in counts:
        raise ParseError("V3000 connection tables are not supported", 4)
    n_atoms = _int_field(counts, 0, 3, 4, "atom count")
    n_bonds = _int_field(counts, 3, 6, 4, "bond count")

    atom_lines = lines[4:4 + n_atoms]
    bond_lines = lines[4 + n_atoms:4 + n_atoms + n_bonds]
    if len(atom_lines) < n_atoms:
        raise ParseError(f"header declares {n_atoms} atoms, found {len(atom_lines)}", len(lines))
    if len(bond_lines) < n_bonds:
        raise ParseError(f"header declares {n_bonds} bonds, found {len(bond_lines)}", len(lines))

    symbols, charges, flagged, xyz = [], [], [], []
    for k, line in enumerate(atom_lines):
        lineno = 5 + k
        parts = line.split()
        if len(parts) < 4:
            raise ParseError("atom line has too few fields", lineno)
        try:
            xyz.append((float(parts[0]), float(parts[1]), float(parts[2])))
        except ValueError:
            raise ParseError("bad atom coordinates", lineno) from None
        symbol = elements.normalize_symbol(parts[3])
        if symbol is None:
            raise UnknownElementError(f"unknown element {parts[3]!r}", lineno)
        symbols.append(symbol)
        code = int(parts[5]) if len(parts) > 5 and parts[5].lstrip("-").isdigit() else 0
        charges.append(_CHARGE_CODES.get(code, 0))
        flagged.append(len(parts) > 6 and parts[6] in ("1", "2"))

    raw_bonds = []
    for k, line in enumerate(bond_lines):
        lineno = 5 + n_atoms + k
        if len(line.split()) == 0:
            raise ParseError("blank bond line", lineno)
        i = _int_field(line, 0, 3, lineno, "bond atom")
        j = _int_field(line, 3, 6, lineno, "bond atom")
        order = _int_field(line, 6, 9, lineno, "bond type")
        stereo = _int_field(line, 9, 12, lineno, "bond stereo", default=0)
        if not (1 <= i <= n_atoms and 1 <= j <= n_atoms):
            raise ParseError(f"bond references atom {i if not 1 <= i <= n_atoms else j} outside 1..{n_atoms}", lineno)
        if i == j:
            raise ParseError("bond joins an atom to itself", lineno)
        if order not in (1, 2, 3, 4):
            raise ParseError(f"unsupported bond type {order}", lineno)
        raw_bonds.append((i - 1, j - 1, order, stereo, lineno))

    saw_chg = False
    for k, line in enumerate(lines[4 + n_atoms + n_bonds:]):
        lineno = 5 + n_atoms + n_bonds + k
        if line.startswith("M  END"):
            break
        if line.startswith("M  CHG"):
            if not saw_chg:
                charges = [0] * n_atoms
                saw_chg = True
            parts = line.split()
            try:
                count = int(parts[2])
                for m in range(count):
                    idx = int(parts[3 + 2 * m]) - 1
                    charges[idx] = int(parts[4 + 2 * m])
            except (ValueError, IndexError):
                raise ParseError("malformed M  CHG line", lineno) from None

    heavy = [k for k, s in enumerate(symbols) if s != "H"]
    remap = {old: new for new, old in enumerate(heavy)}
    h_count = [0] * n_atoms
    bonds = []
    seen = set()
    wedges: dict[int, list[tuple[int, int]]] = {}
    for i, j, order, stereo, lineno in raw_bonds:
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ParseError(f"duplicate bond {i + 1}-{j + 1}", lineno)
        seen.add(key)
        hi, hj = symbols[i] == "H", symbols[j] == "H"
        if hi and hj:
            continue
        if hi or hj:
            h_count[j if hi else i] += 1
            continue
        bonds.append(Bond(remap[i], remap[j], order))
        if order == 1 and stereo in (_WEDGE_UP, _WEDGE_DOWN):
            wedges.setdefault(remap[i], []).append((remap[j], stereo))

    atoms = tuple(Atom(symbols[k], charges[k], None, h_count[k]) for k in heavy)
    coords = np.array([xyz[k] for k in heavy], dtype=float).reshape(-1, 3)
    graph = MolecularGraph(atoms, tuple(bonds), name=lines[0].strip())
    graph = aromatize(MolecularGraph(graph.atoms, graph.bonds, not graph.is_connected(), graph.name))

    flat = len(coords) > 0 and np.allclose(coords[:, 2], 0.0)
    if flat:
        pseudo = coords.copy()
        for center, items in wedges.items():
            for nbr, kind in items:
                pseudo[nbr, 2] = 1.0 if kind == _WEDGE_UP else -1.0
        graph = assign_stereo(graph, pseudo, centers=wedges.keys())
    else:
        centers = set(stereocenter_candidates(graph))
        centers.update(remap[k] for k in heavy if flagged[k] and graph.degree(remap[k]) >= 3)
        graph = assign_stereo(graph, coords, centers=centers)
    return graph, coords

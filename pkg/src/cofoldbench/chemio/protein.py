"""PDB and mmCIF readers (coordinate subset only).

Both formats are reduced to a list of :class:`AtomRecord` and assembled the
same way: hydrogens are dropped, alternate locations are resolved to the
highest occupancy (ties go to the alphabetically first altloc id), only the
first model is read, and residues are routed to protein chains, waters or
organic/inorganic hetero groups.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from cofoldbench import elements
from cofoldbench.errors import EmptyStructureError, ParseError, UnknownElementError
from cofoldbench.structure import (
    AMINO_ACIDS,
    WATER_NAMES,
    AtomSite,
    Chain,
    Cofactors,
    ComplexStructure,
    ResidueSite,
)


@dataclass(frozen=True)
class AtomRecord:
    line: int
    hetero: bool
    name: str
    altloc: str
    res_name: str
    chain: str
    seq: int
    icode: str
    x: float
    y: float
    z: float
    occupancy: float
    element: str


def _guess_element(name: str, res_name: str, hetero: bool) -> str:
    letters = re.sub(r"[^A-Za-z]", "", name)
    if not letters:
        return ""
    if hetero and len(letters) >= 2 and elements.is_element(letters[:2]) and res_name.upper() == name.upper():
        return letters[:2]
    return letters[0]


def _element(raw: str, name: str, res_name: str, hetero: bool, line: int) -> str:
    symbol = raw.strip()
    if not symbol or symbol in (".", "?"):
        symbol = _guess_element(name, res_name, hetero)
    symbol = re.sub(r"[\d+\-]", "", symbol)
    canonical = elements.normalize_symbol(symbol)
    if canonical is None:
        raise UnknownElementError(f"unknown element {symbol!r} for atom {name!r}", line)
    return canonical


def read_pdb_records(text: str) -> list[AtomRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tag = line[:6]
        if tag.startswith("ENDMDL"):
            break
        if tag not in ("ATOM  ", "HETATM"):
            continue
        if len(line) < 54:
            raise ParseError("truncated coordinate record", lineno)
        name = line[12:16].strip()
        res_name = line[17:20].strip()
        try:
            seq = int(line[22:26])
            x, y, z = float(line[30:38]), float(line[38:46]), float(line[46:54])
            occ_field = line[54:60].strip()
            occupancy = float(occ_field) if occ_field else 1.0
        except ValueError as exc:
            raise ParseError(f"malformed coordinate record: {exc}", lineno) from None
        hetero = tag == "HETATM"
        records.append(AtomRecord(
            line=lineno,
            hetero=hetero,
            name=name,
            altloc=line[16].strip(),
            res_name=res_name,
            chain=line[21].strip(),
            seq=seq,
            icode=line[26].strip() if len(line) > 26 else "",
            x=x, y=y, z=z,
            occupancy=occupancy,
            element=_element(line[76:78] if len(line) >= 78 else "", name, res_name, hetero, lineno),
        ))
    return records


_CIF_TOKEN = re.compile(r"""'(?:[^']|'(?=\S))*'(?=\s|$)|"(?:[^"]|"(?=\S))*"(?=\s|$)|\S+""")


def _cif_tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if line.startswith(";"):
            raise ParseError("multi-line text fields are not supported", lineno)
        for m in _CIF_TOKEN.finditer(line):
            tok = m.group(0)
            if tok.startswith("#"):
                break
            if len(tok) >= 2 and tok[0] == tok[-1] and tok[0] in "'\"":
                tok = tok[1:-1]
            yield lineno, tok


def read_mmcif_records(text: str) -> list[AtomRecord]:
    tokens = list(_cif_tokens(text))
    k = 0
    columns: list[str] = []
    values: list[tuple[int, str]] = []
    while k < len(tokens):
        if tokens[k][1].lower() == "loop_" and k + 1 < len(tokens) and tokens[k + 1][1].lower().startswith("_atom_site."):
            k += 1
            while k < len(tokens) and tokens[k][1].lower().startswith("_atom_site."):
                columns.append(tokens[k][1].split(".", 1)[1].lower())
                k += 1
            while k < len(tokens):
                tok = tokens[k][1]
                if tok.startswith("_") or tok.lower() in ("loop_",) or tok.lower().startswith("data_"):
                    break
                values.append(tokens[k])
                k += 1
            break
        k += 1
    if not columns:
        return []
    if len(values) % len(columns):
        raise ParseError("atom_site loop has a ragged final row", values[-1][0] if values else None)

    col = {name: i for i, name in enumerate(columns)}

    def pick(row, *names, default=""):
        for n in names:
            if n in col:
                v = row[col[n]][1]
                return "" if v in (".", "?") else v
        return default

    for required in ("cartn_x", "cartn_y", "cartn_z"):
        if required not in col:
            raise ParseError(f"atom_site loop lacks {required}", tokens[0][0])

    records = []
    first_model = None
    width = len(columns)
    for start in range(0, len(values), width):
        row = values[start:start + width]
        lineno = row[0][0]
        model = pick(row, "pdbx_pdb_model_num")
        if model:
            if first_model is None:
                first_model = model
            elif model != first_model:
                continue
        name = pick(row, "auth_atom_id", "label_atom_id")
        res_name = pick(row, "auth_comp_id", "label_comp_id")
        group = pick(row, "group_pdb", default="ATOM")
        try:
            seq_text = pick(row, "auth_seq_id", "label_seq_id")
            seq = int(seq_text) if seq_text else 0
            x = float(pick(row, "cartn_x"))
            y = float(pick(row, "cartn_y"))
            z = float(pick(row, "cartn_z"))
            occ_text = pick(row, "occupancy")
            occupancy = float(occ_text) if occ_text else 1.0
        except ValueError as exc:
            raise ParseError(f"malformed atom_site row: {exc}", lineno) from None
        hetero = group.upper() == "HETATM"
        records.append(AtomRecord(
            line=lineno,
            hetero=hetero,
            name=name,
            altloc=pick(row, "label_alt_id"),
            res_name=res_name,
            chain=pick(row, "auth_asym_id", "label_asym_id"),
            seq=seq,
            icode=pick(row, "pdbx_pdb_ins_code"),
            x=x, y=y, z=z,
            occupancy=occupancy,
            element=_element(pick(row, "type_symbol"), name, res_name, hetero, lineno),
        ))
    return records


def _resolve_altlocs(records: list[AtomRecord]) -> list[AtomRecord]:
    best: dict[tuple, AtomRecord] = {}
    order: list[tuple] = []
    for rec in records:
        key = (rec.chain, rec.seq, rec.icode, rec.res_name, rec.name)
        cur = best.get(key)
        if cur is None:
            best[key] = rec
            order.append(key)
        elif (-rec.occupancy, rec.altloc) < (-cur.occupancy, cur.altloc):
            best[key] = rec
    return [best[k] for k in order]


def assemble(records: list[AtomRecord]) -> ComplexStructure:
    records = [r for r in records if r.element != "H"]
    records = _resolve_altlocs(records)

    grouped: dict[tuple, list[AtomRecord]] = {}
    for rec in records:
        grouped.setdefault((rec.chain, rec.seq, rec.icode, rec.res_name), []).append(rec)

    chains: dict[str, list[ResidueSite]] = {}
    organic, inorganic, water = [], [], []
    protein_keys = set()
    for (chain, seq, icode, res_name), recs in grouped.items():
        res_name = res_name.upper()
        atoms = tuple(
            AtomSite(r.name, r.element, (r.x, r.y, r.z), r.occupancy, r.hetero) for r in recs
        )
        res = ResidueSite(chain, seq, icode, res_name, atoms)
        if res_name in WATER_NAMES:
            water.append(res)
        elif res_name in AMINO_ACIDS:
            # microheterogeneity: keep the first residue type seen at a position
            if res.key not in protein_keys:
                protein_keys.add(res.key)
                chains.setdefault(chain, []).append(res)
        elif any(a.element == "C" for a in atoms):
            organic.append(res)
        else:
            inorganic.append(res)

    if not chains:
        raise EmptyStructureError("structure contains no protein atoms")
    return ComplexStructure(
        chains=tuple(Chain(cid, tuple(res)) for cid, res in chains.items()),
        ligands=(),
        cofactors=Cofactors(tuple(organic), tuple(inorganic), tuple(water)),
    )


def parse_protein_structure(data: bytes | str, format: str) -> ComplexStructure:
    """Parse a PDB or mmCIF byte stream into a :class:`ComplexStructure`.

    Raises:
        ParseError: a coordinate record could not be read (carries the line).
        EmptyStructureError: no amino-acid residues were found.
    """
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    fmt = format.lower()
    if fmt == "pdb":
        records = read_pdb_records(text)
    elif fmt in ("mmcif", "cif"):
        records = read_mmcif_records(text)
    else:
        raise ValueError(f"unsupported structure format {format!r}")
    return assemble(records)

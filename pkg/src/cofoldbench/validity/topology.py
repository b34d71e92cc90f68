"""Loading, sanitization and graph-identity checks."""

from __future__ import annotations

import networkx as nx

from cofoldbench import elements
from cofoldbench.molgraph import AROMATIC, MolecularGraph, graphs_match

from .report import CheckResult


def kekulize(g: MolecularGraph) -> dict[int, bool] | None:
    """Place one double bond on every aromatic atom that needs it.

    Neutral aromatic carbons must receive a double bond. Heteroatoms that
    could take one (pyridine-like N without hydrogens, charged atoms) may,
    but need not. Returns ``{atom: has_double}`` for aromatic atoms, or None
    when no assignment covers every carbon.
    """
    aromatic_atoms = sorted({
        x for b in g.bonds if b.order == AROMATIC for x in (b.i, b.j)
    })
    if not aromatic_atoms:
        return {}
    mandatory, optional = set(), set()
    for i in aromatic_atoms:
        atom = g.atoms[i]
        allowed = elements.allowed_valences(atom.element, atom.charge)
        if not allowed:
            continue
        base = atom.explicit_h
        for j in g.neighbors[i]:
            order = g.bond_order(i, j)
            base += 1 if order == AROMATIC else order
        target = next((v for v in allowed if v >= base), None)
        if target is None or target == base:
            continue
        if atom.element == "C" and atom.charge == 0:
            mandatory.add(i)
        else:
            optional.add(i)

    pool = mandatory | optional
    graph = nx.Graph()
    graph.add_nodes_from(sorted(pool))
    for b in g.bonds:
        if b.order == AROMATIC and b.i in pool and b.j in pool:
            graph.add_edge(b.i, b.j, weight=(b.i in mandatory) + (b.j in mandatory))
    matching = nx.max_weight_matching(graph, maxcardinality=False)
    matched = {x for edge in matching for x in edge}
    if not mandatory <= matched:
        return None
    return {i: i in matched for i in aromatic_atoms}


def sanitize(g: MolecularGraph) -> tuple[bool, str]:
    """Kekulize aromatic systems and check every atom against its valence table."""
    kek = kekulize(g)
    if kek is None:
        return False, "cannot kekulize aromatic system"
    for i, atom in enumerate(g.atoms):
        allowed = elements.allowed_valences(atom.element, atom.charge)
        if not allowed:
            continue
        total = atom.explicit_h
        for j in g.neighbors[i]:
            order = g.bond_order(i, j)
            total += 1 if order == AROMATIC else order
        if kek.get(i):
            total += 1
        if total > max(allowed):
            return False, f"atom {i} ({atom.element}{atom.charge:+d}) has valence {total} > {max(allowed)}"
    return True, ""


def check_topology(
    truth_graph: MolecularGraph | None,
    pred_graph: MolecularGraph | None,
    pred_coords=None,
    cond_loaded: bool = True,
) -> dict[str, CheckResult]:
    """Loading flags, sanitization, connectivity, formula and bond identity.

    A graph passed as None means the file failed to load; every check that
    needs it then fails.
    """
    out: dict[str, CheckResult] = {}
    pred_ok = pred_graph is not None and (pred_coords is None or len(pred_coords) == len(pred_graph))
    out["mol_pred_loaded"] = CheckResult(pred_ok, detail="" if pred_ok else "predicted ligand not loaded")
    out["mol_true_loaded"] = CheckResult(
        truth_graph is not None, detail="" if truth_graph is not None else "reference ligand not loaded"
    )
    out["mol_cond_loaded"] = CheckResult(
        bool(cond_loaded), detail="" if cond_loaded else "conditioning protein not loaded"
    )

    if not pred_ok:
        for name in ("sanitization", "all_atoms_connected", "molecular_formula", "molecular_bonds"):
            out[name] = CheckResult(False, detail="predicted ligand not loaded")
        return out

    ok, why = sanitize(pred_graph)
    out["sanitization"] = CheckResult(ok, detail=why)
    n_frag = len(pred_graph.components)
    out["all_atoms_connected"] = CheckResult(n_frag == 1, float(n_frag), f"{n_frag} fragment(s)")

    if truth_graph is None:
        out["molecular_formula"] = CheckResult(False, detail="reference ligand not loaded")
        out["molecular_bonds"] = CheckResult(False, detail="reference ligand not loaded")
        return out
    f_pred, f_true = pred_graph.formula(), truth_graph.formula()
    out["molecular_formula"] = CheckResult(f_pred == f_true, detail=f"{f_pred} vs {f_true}")
    mapping = graphs_match(truth_graph, pred_graph)
    out["molecular_bonds"] = CheckResult(
        mapping is not None, detail="" if mapping is not None else "bond graphs differ"
    )
    return out

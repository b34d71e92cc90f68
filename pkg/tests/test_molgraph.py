import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cofoldbench import elements
from cofoldbench.molgraph import (
    AROMATIC,
    Atom,
    Bond,
    MolecularGraph,
    aromatic_rings,
    aromatize,
    automorphisms,
    build_graph,
    circular_fingerprint,
    graphs_match,
    is_automorphism,
    perceive_rings,
    tanimoto,
)
from cofoldbench.molgraph.fingerprint import Fingerprint, fnv1a_64
from cofoldbench.molgraph.iso import iter_isomorphisms
from cofoldbench.molgraph.stereo import (
    assign_stereo,
    dihedral,
    signed_volume,
    stereo_double_bond_candidates,
    stereocenter_candidates,
)

BENZENE = build_graph(["C"] * 6, [(i, (i + 1) % 6, AROMATIC) for i in range(6)])
PARA_XYLENE = build_graph(
    ["C"] * 8, [(i, (i + 1) % 6, AROMATIC) for i in range(6)] + [(0, 6), (3, 7)]
)
NEOPENTANE = build_graph(["C"] * 5, [(0, 1), (0, 2), (0, 3), (0, 4)])
TERT_BUTANOL = build_graph(["C", "C", "C", "C", "O"], [(0, 1), (0, 2), (0, 3), (0, 4)])
ETHANOL = build_graph(["C", "C", "O"], [(0, 1), (1, 2)])
NAPHTHALENE = build_graph(
    ["C"] * 10,
    [(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 4, 4), (4, 5, 4), (5, 0, 4),
     (4, 6, 4), (6, 7, 4), (7, 8, 4), (8, 9, 4), (9, 5, 4)],
)


def brute_force_automorphisms(g: MolecularGraph) -> set[tuple[int, ...]]:
    """Every label-preserving permutation that maps the bond set (with orders) onto itself."""
    n = len(g)
    bonds = {(min(b.i, b.j), max(b.i, b.j)): b.order for b in g.bonds}
    out = set()
    for perm in itertools.permutations(range(n)):
        if any((g.atoms[i].element, g.atoms[i].charge) != (g.atoms[perm[i]].element, g.atoms[perm[i]].charge) for i in range(n)):
            continue
        mapped = {(min(perm[i], perm[j]), max(perm[i], perm[j])): o for (i, j), o in bonds.items()}
        if mapped == bonds:
            out.add(perm)
    return out


@pytest.mark.parametrize(
    "graph, expected",
    [(BENZENE, 12), (PARA_XYLENE, 4), (NEOPENTANE, 24), (TERT_BUTANOL, 6), (ETHANOL, 1)],
)
def test_automorphisms_match_brute_force(graph, expected):
    oracle = brute_force_automorphisms(graph)
    assert len(oracle) == expected
    found = automorphisms(graph)
    assert not found.truncated
    assert set(found.perms) == oracle
    assert found.perms[0] == tuple(range(len(graph)))


def test_automorphism_cap_sets_truncation_flag():
    star = build_graph(["C"] * 8, [(0, i) for i in range(1, 8)])
    capped = automorphisms(star, max_count=10)
    assert capped.truncated and len(capped) == 10
    assert all(is_automorphism(star, p) for p in capped)
    assert len(automorphisms(star)) == math.factorial(7)


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 6))
    elems = draw(st.lists(st.sampled_from(["C", "N", "O"]), min_size=n, max_size=n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    orders = draw(st.lists(st.sampled_from([1, 2]), min_size=len(chosen), max_size=len(chosen)))
    return build_graph(elems, [(i, j, o) for (i, j), o in zip(chosen, orders)])


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_automorphisms_equal_brute_force_on_random_graphs(g):
    assert set(automorphisms(g).perms) == brute_force_automorphisms(g)


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.randoms(use_true_random=False))
def test_graphs_match_recovers_relabelling(g, rnd):
    order = list(range(len(g)))
    rnd.shuffle(order)
    h = g.permuted(order)
    m = graphs_match(g, h)
    assert m is not None
    bonds_g = {(min(b.i, b.j), max(b.i, b.j)): b.order for b in g.bonds}
    bonds_h = {(min(b.i, b.j), max(b.i, b.j)): b.order for b in h.bonds}
    assert {(min(m[i], m[j]), max(m[i], m[j])): o for (i, j), o in bonds_g.items()} == bonds_h
    assert all(g.atoms[i].element == h.atoms[m[i]].element for i in range(len(g)))


def test_graphs_match_rejects_different_topology():
    cyclohexane = build_graph(["C"] * 6, [(i, (i + 1) % 6) for i in range(6)])
    assert graphs_match(BENZENE, cyclohexane) is None
    assert graphs_match(ETHANOL, build_graph(["C", "O", "C"], [(0, 1), (1, 2)])) is None
    assert list(iter_isomorphisms(ETHANOL, NEOPENTANE)) == []


def _nx(g: MolecularGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(len(g)))
    h.add_edges_from((b.i, b.j) for b in g.bonds)
    return h


CUBANE = build_graph(
    ["C"] * 8,
    [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
)
SPIRO = build_graph(["C"] * 7, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 5), (5, 0), (5, 6)])


@pytest.mark.parametrize("graph", [BENZENE, NAPHTHALENE, CUBANE, SPIRO, PARA_XYLENE, ETHANOL])
def test_ring_basis_matches_networkx_minimum_cycle_basis(graph):
    ours = perceive_rings(graph)
    oracle = nx.minimum_cycle_basis(_nx(graph))
    assert sorted(len(r) for r in ours) == sorted(len(c) for c in oracle)
    for ring in ours:
        for a, b in zip(ring, ring[1:] + ring[:1]):
            assert graph.bond_order(a, b) is not None


def test_naphthalene_rings_are_two_hexagons_not_the_perimeter():
    rings = perceive_rings(NAPHTHALENE)
    assert sorted(len(r) for r in rings) == [6, 6]
    assert len(aromatic_rings(NAPHTHALENE)) == 2


def test_formula_and_hydrogens():
    assert ETHANOL.formula() == "C2H6O"
    assert BENZENE.formula() == "C6H6"
    assert NAPHTHALENE.formula() == "C10H8"
    charged = build_graph(["C", "N"], [(0, 1)], charges=[0, 1])
    assert charged.formula() == "CH6N"
    assert charged.net_charge() == 1


def test_aromatize_kekule_forms():
    kekule = build_graph(["C"] * 6, [(i, (i + 1) % 6, 2 if i % 2 == 0 else 1) for i in range(6)])
    arom = aromatize(kekule)
    assert all(b.order == AROMATIC for b in arom.bonds)
    assert arom.formula() == "C6H6"
    assert len(automorphisms(arom)) == 12
    cyclohexene = build_graph(["C"] * 6, [(0, 1, 2)] + [(i, (i + 1) % 6) for i in range(1, 6)])
    assert aromatize(cyclohexene) is cyclohexene
    furan = build_graph(["O", "C", "C", "C", "C"], [(0, 1), (1, 2, 2), (2, 3), (3, 4, 2), (4, 0)])
    assert all(b.order == AROMATIC for b in aromatize(furan).bonds)
    assert aromatize(furan).formula() == furan.formula()


def test_graph_validation_and_serialisation():
    with pytest.raises(ValueError):
        MolecularGraph((Atom("C"),), (Bond(0, 0),))
    with pytest.raises(ValueError):
        MolecularGraph((Atom("C"), Atom("C")), (Bond(0, 5),))
    assert MolecularGraph.from_dict(NAPHTHALENE.to_dict()) == NAPHTHALENE
    two = build_graph(["C", "C", "O"], [(0, 1)])
    assert not two.is_connected() and len(two.components) == 2
    assert ETHANOL.topological_distances[0][2] == 2
    assert two.topological_distances[0][2] < 0


def test_fnv1a_reference_vectors():
    assert fnv1a_64(b"") == 0xCBF29CE484222325
    assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a_64(b"foobar") == 0x85944171F73967E8


def test_fingerprint_properties():
    fp_b = circular_fingerprint(BENZENE)
    fp_c = circular_fingerprint(build_graph(["C"] * 6, [(i, (i + 1) % 6) for i in range(6)]))
    assert tanimoto(fp_b, fp_b) == 1.0
    assert tanimoto(fp_b, fp_c) == tanimoto(fp_c, fp_b)
    assert 0.0 <= tanimoto(fp_b, fp_c) < 1.0
    assert tanimoto(Fingerprint(frozenset()), Fingerprint(frozenset())) == 1.0
    with pytest.raises(ValueError):
        tanimoto(fp_b, circular_fingerprint(BENZENE, nbits=1024))
    with pytest.raises(ValueError):
        circular_fingerprint(BENZENE, nbits=1000)
    assert fp_b.to_array().sum() == fp_b.popcount


@settings(max_examples=40, deadline=None)
@given(small_graphs(), st.randoms(use_true_random=False))
def test_fingerprint_invariant_under_relabelling(g, rnd):
    order = list(range(len(g)))
    rnd.shuffle(order)
    assert circular_fingerprint(g) == circular_fingerprint(g.permuted(order))


def test_elements_table():
    assert elements.normalize_symbol("D") == "H"
    assert elements.normalize_symbol("cl") == "Cl"
    assert elements.normalize_symbol("Xx") is None
    assert elements.atomic_number("C") == 6
    assert elements.symbol_for(8) == "O"
    assert elements.vdw_radius("C") == pytest.approx(1.70)
    assert elements.allowed_valences("N", 1) == elements.allowed_valences("C", 0)
    assert elements.allowed_valences("Fe") is None


# A tetrahedral CHFClBr-like centre: atom 0 bonded to 1, 2, 3 with an implicit H.
CHIRAL = build_graph(["C", "F", "Cl", "Br"], [(0, 1), (0, 2), (0, 3)])
TETRA = np.array([[0, 0, 0], [1, 1, 1], [1, -1, -1], [-1, 1, -1]], dtype=float)


def test_stereocentre_parity_flips_under_reflection():
    assert stereocenter_candidates(CHIRAL) == [0]
    g = assign_stereo(CHIRAL, TETRA)
    mirror = assign_stereo(CHIRAL, TETRA * [1, 1, -1])
    assert g.atoms[0].parity == -mirror.atoms[0].parity
    assert abs(signed_volume(TETRA, 0, [1, 2, 3])) > 0
    assert stereocenter_candidates(NEOPENTANE) == []


def test_double_bond_configuration():
    butene = build_graph(["C", "C", "C", "C"], [(0, 1), (1, 2, 2), (2, 3)])
    assert stereo_double_bond_candidates(butene) == [1]
    cis = np.array([[-1.0, 1.0, 0], [0, 0, 0], [1.3, 0, 0], [2.3, 1.0, 0]])
    trans = cis.copy()
    trans[3, 1] = -1.0
    assert assign_stereo(butene, cis).bonds[1].stereo == "cis"
    assert assign_stereo(butene, trans).bonds[1].stereo == "trans"
    assert abs(dihedral(*cis[[0, 1, 2, 3]])) < 1e-9
    assert abs(abs(dihedral(*trans[[0, 1, 2, 3]])) - 180.0) < 1e-9

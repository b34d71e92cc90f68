import numpy as np
import pytest
import synth
from oracles import brute_force_bisy, grid_search_superposition_rmsd
from scipy.spatial.transform import Rotation

from cofoldbench.chemio import parse_ligand
from cofoldbench.errors import CoverageError, DegenerateGeometryError, EmptySiteError, TopologyError
from cofoldbench.geom import LddtConfig, binding_site, bisy_rmsd, bisy_rmsd_detail, kabsch, lddt_pli
from cofoldbench.structure import Ligand

# ---------------------------------------------------------------- Kabsch


def test_kabsch_recovers_random_rotations_exactly():
    rng = np.random.default_rng(1)
    for _ in range(100):
        P = rng.normal(size=(12, 3)) * 5
        R = synth.random_rotation(rng)
        t = rng.normal(size=3) * 10
        sup = kabsch(P, P @ R.T + t)
        # the fit maps the mobile set back, so it must recover the inverse rotation
        assert np.abs(sup.rotation - R.T).max() < 1e-9
        assert sup.rmsd < 1e-9


def test_kabsch_maps_mobile_onto_reference():
    rng = np.random.default_rng(2)
    P = rng.normal(size=(8, 3))
    R = synth.random_rotation(rng)
    Q = P @ R.T + [1, 2, 3]
    sup = kabsch(P, Q)
    np.testing.assert_allclose(sup.apply(Q), P, atol=1e-10)


def test_kabsch_matches_grid_search_on_displaced_vertex():
    P = np.array([[0, 0, 0], [1.5, 0, 0], [0, 1.5, 0], [0, 0, 1.5], [1.5, 1.5, 1.5]], dtype=float)
    R = Rotation.from_rotvec([0.3, -0.5, 0.9]).as_matrix()
    Q = P @ R.T + [4, -2, 1]
    Q[4] += [0.4, -0.3, 0.2]
    oracle = grid_search_superposition_rmsd(Q, P)
    assert abs(kabsch(P, Q).rmsd - oracle) < 1e-3


def test_kabsch_rotation_is_proper():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        n = rng.integers(3, 10)
        sup = kabsch(rng.normal(size=(n, 3)), rng.normal(size=(n, 3)))
        assert np.linalg.det(sup.rotation) == pytest.approx(1.0, abs=1e-9)


def test_kabsch_rejects_degenerate_inputs():
    with pytest.raises(DegenerateGeometryError):
        kabsch(np.zeros((2, 3)), np.zeros((2, 3)))
    line = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
    with pytest.raises(DegenerateGeometryError):
        kabsch(line, line)
    with pytest.raises(ValueError):
        kabsch(np.zeros((4, 3)), np.zeros((5, 3)))


# ---------------------------------------------------------- ligand RMSD

PARA_XYLENE = (
    ["C"] * 8,
    [(i, (i + 1) % 6, 2 if i % 2 == 0 else 1) for i in range(6)] + [(0, 6, 1), (3, 7, 1)],
    np.vstack([synth.benzene_coords(), [[2.9, 0, 0], [-2.9, 0, 0]]]),
)
TERT_BUTANOL = (
    ["C", "C", "C", "C", "O"],
    [(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1)],
    np.array([[0, 0, 0], [1.5, 0, 0], [-0.5, 1.4, 0], [-0.5, -0.7, 1.2], [-0.5, -0.7, -1.2]]),
)
BENZENE = (["C"] * 6, synth.BENZENE_BONDS, synth.benzene_coords())


def _complex(residues, syms, bonds, xyz):
    return synth.complex_from(residues, synth.sdf_text(syms, xyz, bonds))


@pytest.mark.parametrize("ligand", [BENZENE, PARA_XYLENE, TERT_BUTANOL], ids=["benzene", "p-xylene", "tert-butanol"])
def test_bisy_rmsd_equals_brute_force_over_bijections(ligand):
    syms, bonds, xyz = ligand
    rng = np.random.default_rng(4)
    protein = synth.planar_protein(half=2)
    truth = _complex(protein, syms, bonds, xyz)

    order = rng.permutation(len(syms))
    inv = np.argsort(order)
    pred_syms = [syms[k] for k in order]
    pred_bonds = [(int(inv[i]), int(inv[j]), o) for i, j, o in bonds]
    pred_xyz_local = xyz[order] + rng.normal(scale=0.3, size=(len(syms), 3))
    R = synth.random_rotation(rng)
    t = rng.normal(size=3) * 5
    noisy = [(c, s, n, [(a, e, np.asarray(p) + rng.normal(scale=0.2, size=3)) for a, e, p in atoms]) for c, s, n, atoms in protein]
    pred_res = synth.move_residues(noisy, R, t)
    pred = _complex(pred_res, pred_syms, pred_bonds, pred_xyz_local @ R.T + t)

    site = sorted(binding_site(truth))
    site_truth = np.array([truth.residue_map[k].atom("CA").coords for k in site])
    site_pred = np.array([pred.residue_map[k].atom("CA").coords for k in site])
    oracle = brute_force_bisy(
        syms, bonds, truth.ligand.coords, pred_syms, pred_bonds, pred.ligand.coords, site_truth, site_pred
    )
    assert abs(bisy_rmsd(truth, pred) - oracle) < 1e-9


def test_relabelled_benzene_scores_zero():
    protein = synth.planar_protein(half=2)
    xyz = synth.benzene_coords()
    truth = _complex(protein, *BENZENE[:2], xyz)
    shifted = np.roll(xyz, -1, axis=0)
    pred = _complex(protein, *BENZENE[:2], shifted)
    detail = bisy_rmsd_detail(truth, pred)
    assert detail.naive_rmsd > 1.0
    assert detail.rmsd < 1e-9
    assert detail.n_correspondences == 12


def test_rmsd_errors():
    protein = synth.planar_protein(half=2)
    truth = _complex(protein, *BENZENE)
    other = _complex(protein, ["C"] * 6, [(i, (i + 1) % 6, 1) for i in range(6)], synth.benzene_coords())
    with pytest.raises(TopologyError):
        bisy_rmsd(truth, other)
    partial = _complex(protein[:3], *BENZENE)
    with pytest.raises(CoverageError):
        bisy_rmsd(truth, partial)
    far = _complex(synth.planar_protein(half=1, z=-40.0), *BENZENE)
    with pytest.raises(EmptySiteError):
        binding_site(far)


def test_binding_site_cutoff_is_strict():
    residues = [("A", 1, "GLY", [("CA", "C", (0, 0, 10.0))]), ("A", 2, "GLY", [("CA", "C", (0, 0, -9.99))])]
    lig = synth.sdf_text(["C"], [(0, 0, 0)], [])
    s = synth.complex_from(residues, lig)
    assert [k.seq for k in binding_site(s)] == [2]


# ---------------------------------------------------------------- lDDT-PLI


def test_lddt_pli_perfect_and_shifted():
    protein = synth.planar_protein(half=2)
    truth = _complex(protein, *BENZENE)
    assert lddt_pli(truth, truth) == 1.0
    for shift, expected_max in ((0.3, 1.0), (5.0, 0.5)):
        pred = _complex(protein, BENZENE[0], BENZENE[1], BENZENE[2] + [0, 0, shift])
        assert 0.0 <= lddt_pli(truth, pred) <= expected_max


def test_lddt_pli_hand_counted_fixture():
    # one ligand atom, two protein atoms at 3 and 5 A; prediction moves the first to 3.7 A
    residues = [("A", 1, "GLY", [("CA", "C", (3.0, 0, 0))]), ("A", 2, "GLY", [("CA", "C", (-5.0, 0, 0))])]
    lig = synth.sdf_text(["C"], [(0, 0, 0)], [])
    truth = synth.complex_from(residues, lig)
    moved = [("A", 1, "GLY", [("CA", "C", (3.7, 0, 0))]), residues[1]]
    pred = synth.complex_from(moved, lig)
    # pair 1 differs by 0.7: preserved at 1, 2, 4 (3 of 4); pair 2 preserved at all 4
    assert lddt_pli(truth, pred) == pytest.approx(7 / 8)
    missing = synth.complex_from(residues[1:], lig)
    assert lddt_pli(truth, missing) == pytest.approx(4 / 8)


def test_lddt_config_validation():
    with pytest.raises(ValueError):
        LddtConfig(inclusion_radius=0)
    with pytest.raises(ValueError):
        LddtConfig(thresholds=(1.0, 0.5))
    residues = [("A", 1, "GLY", [("CA", "C", (30.0, 0, 0))])]
    s = synth.complex_from(residues, synth.sdf_text(["C"], [(0, 0, 0)], []))
    with pytest.raises(EmptySiteError):
        lddt_pli(s, s)


def test_ligand_graph_identity_not_coordinates_drives_matching():
    g, xyz = parse_ligand(synth.benzene_sdf())
    lig = Ligand(g, xyz, "X")
    assert lig == Ligand(g, xyz.copy(), "X")

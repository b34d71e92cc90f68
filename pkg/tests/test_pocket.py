import logging

import numpy as np
import pytest
import synth

from cofoldbench.pocket import PocketSelection, residue_scores, select_pocket_residues, separated
from cofoldbench.structure import ResidueKey

ONE_ATOM = synth.sdf_text(["C"], [(0.0, 0.0, 0.0)], [])


def _res(chain, seq, xyz, name="GLY"):
    return (chain, seq, name, [("CA", "C", xyz)])


def three_residue_fixture():
    # scores 3.0 / 3.2 / 4.0 for seq 10 / 13 / 30; seq 13 is too close to 10
    residues = [_res("A", 10, (3.0, 0, 0)), _res("A", 13, (0, 3.2, 0)), _res("A", 30, (0, 0, -4.0))]
    return synth.complex_from(residues, ONE_ATOM)


def test_three_residue_fixture_selects_10_and_30():
    sel = select_pocket_residues(three_residue_fixture())
    assert [k.seq for k in sel.residues] == [10, 30]
    assert sel.median_distances == pytest.approx((3.0, 4.0))


def test_median_over_ligand_atoms_of_residue_minimum():
    # ligand atoms on the x axis; per-atom minima enumerated below
    lig = synth.sdf_text(["C", "C", "C"], [(0, 0, 0), (1.5, 0, 0), (3.0, 0, 0)], [(0, 1, 1), (1, 2, 1)])
    residue = ("A", 1, "SER", [("CA", "C", (0, 2.0, 0)), ("CB", "C", (1.5, -3.0, 0)), ("OG", "O", (3.0, 0, 7.0))])
    s = synth.complex_from([residue], lig)
    # atom 0: min(2.0, |(1.5,-3,0)|=3.354, |(3,0,7)|=7.616) = 2.0
    # atom 1: min(|(-1.5,2,0)|=2.5, 3.0, |(1.5,0,7)|=7.159) = 2.5
    # atom 2: min(|(-3,2,0)|=3.606, |(-1.5,-3,0)|=3.354, 7.0) = 3.354
    expected = float(np.median([2.0, 2.5, np.hypot(1.5, 3.0)]))
    assert residue_scores(s)[ResidueKey("A", 1)][0] == pytest.approx(expected)
    pairs = residue_scores(s, mode="pairs")[ResidueKey("A", 1)][0]
    d = [2.0, np.hypot(1.5, 3.0), 2.5, 3.0, np.hypot(3.0, 2.0), np.hypot(1.5, 3.0)]
    assert pairs == pytest.approx(float(np.median(d)))


def test_single_residue_in_range():
    s = synth.complex_from([_res("A", 5, (3.0, 0, 0)), _res("A", 40, (9.0, 0, 0))], ONE_ATOM)
    sel = select_pocket_residues(s)
    assert [k.seq for k in sel.residues] == [5]


def test_floating_ligand_gives_empty_selection_with_warning(caplog):
    s = synth.complex_from([_res("A", 1, (20.0, 0, 0))], ONE_ATOM)
    with caplog.at_level(logging.WARNING):
        sel = select_pocket_residues(s)
    assert sel.residues == () and sel.median_distances == ()
    assert "empty pocket selection" in caplog.text


def test_cross_chain_second_pick_is_allowed():
    residues = [_res("A", 10, (3.0, 0, 0)), _res("B", 11, (0, 3.5, 0)), _res("A", 12, (0, 0, 3.2))]
    sel = select_pocket_residues(synth.complex_from(residues, ONE_ATOM))
    assert sel.residues == (ResidueKey("A", 10), ResidueKey("B", 11))


def test_ties_break_by_chain_then_sequence():
    residues = [_res("B", 1, (3.0, 0, 0)), _res("A", 20, (-3.0, 0, 0)), _res("A", 2, (0, 3.0, 0))]
    sel = select_pocket_residues(synth.complex_from(residues, ONE_ATOM))
    assert sel.residues == (ResidueKey("A", 2), ResidueKey("A", 20))


def test_selection_invariant_under_rigid_motion():
    rng = np.random.default_rng(8)
    residues = synth.planar_protein(z=-4.0)
    base = select_pocket_residues(synth.complex_from(residues, synth.benzene_sdf()))
    assert len(base.residues) == 2
    for _ in range(20):
        R = synth.random_rotation(rng)
        t = rng.normal(size=3) * 10
        lig = synth.sdf_text(["C"] * 6, synth.benzene_coords() @ R.T + t, synth.BENZENE_BONDS)
        moved = select_pocket_residues(synth.complex_from(synth.move_residues(residues, R, t), lig))
        assert moved.residues == base.residues
        # PDB coordinates carry three decimals
        assert moved.median_distances == pytest.approx(base.median_distances, abs=5e-3)


def test_selection_type_invariants():
    with pytest.raises(ValueError):
        PocketSelection((ResidueKey("A", 1), ResidueKey("A", 5)), (3.0, 4.0))
    with pytest.raises(ValueError):
        PocketSelection(tuple(ResidueKey("A", i) for i in (1, 10, 20)), (1.0, 2.0, 3.0))
    assert separated(ResidueKey("A", 1), ResidueKey("B", 2))
    assert separated(ResidueKey("A", 1), ResidueKey("A", 9))
    assert not separated(ResidueKey("A", 1), ResidueKey("A", 8))
    sel = select_pocket_residues(three_residue_fixture())
    out = sel.to_dict("e1")
    assert out["entry_id"] == "e1"
    assert [(r["chain"], r["seq"], r["name"]) for r in out["residues"]] == [("A", 10, "GLY"), ("A", 30, "GLY")]
    with pytest.raises(ValueError):
        residue_scores(three_residue_fixture(), mode="centroid")

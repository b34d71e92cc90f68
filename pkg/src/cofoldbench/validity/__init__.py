"""Physical plausibility suite (24 named checks; PB-valid is their conjunction)."""

from __future__ import annotations

from cofoldbench.structure import ComplexStructure

from .environment import GROUP_LABELS, check_environment, volume_overlap_fraction
from .geometry import check_geometry, strain_energy
from .report import CHECK_NAMES, CheckConfig, CheckReport, CheckResult
from .stereo import check_stereo
from .topology import check_topology, kekulize, sanitize

_POSE_DEPENDENT = (
    "double_bond_stereochemistry",
    "tetrahedral_chirality",
    "bond_lengths",
    "bond_angles",
    "internal_steric_clash",
    "aromatic_ring_flatness",
    "double_bond_flatness",
    "internal_energy",
    "protein-ligand_maximum_distance",
    "minimum_distance_to_protein",
    "minimum_distance_to_organic_cofactors",
    "minimum_distance_to_inorganic_cofactors",
    "minimum_distance_to_waters",
    "volume_overlap_with_protein",
    "volume_overlap_with_organic_cofactors",
    "volume_overlap_with_inorganic_cofactors",
    "volume_overlap_with_waters",
)


def run_all_checks(
    truth: ComplexStructure | None,
    pred: ComplexStructure | None,
    cfg: CheckConfig | None = None,
    reference_coords=None,
) -> CheckReport:
    """Run the full suite on one pose.

    ``truth`` or ``pred`` may be None (or lack a ligand) when loading failed;
    the report then records the failure instead of raising.
    ``reference_coords`` is an optional low-energy conformer in the atom
    order of the predicted ligand, used by ``internal_energy``.
    """
    cfg = cfg or CheckConfig()
    truth_graph = truth.ligand.graph if truth is not None and truth.ligands else None
    pred_lig = pred.ligand if pred is not None and pred.ligands else None
    cond_loaded = pred is not None and len(pred.protein) > 0

    results: dict[str, CheckResult] = {}
    results.update(check_topology(
        truth_graph,
        pred_lig.graph if pred_lig else None,
        pred_lig.coords if pred_lig else None,
        cond_loaded,
    ))

    if pred_lig is None:
        for name in _POSE_DEPENDENT:
            results[name] = CheckResult(False, None, "predicted ligand not loaded")
        return CheckReport(results)

    if truth_graph is None:
        for name in ("double_bond_stereochemistry", "tetrahedral_chirality"):
            results[name] = CheckResult(False, None, "reference ligand not loaded")
    else:
        results.update(check_stereo(truth_graph, pred_lig.graph, pred_lig.coords))
    results.update(check_geometry(pred_lig.graph, pred_lig.coords, cfg, reference_coords))
    results.update(check_environment(pred, cfg))
    return CheckReport(results)


__all__ = [
    "CHECK_NAMES",
    "CheckConfig",
    "CheckReport",
    "CheckResult",
    "GROUP_LABELS",
    "check_environment",
    "check_geometry",
    "check_stereo",
    "check_topology",
    "kekulize",
    "run_all_checks",
    "sanitize",
    "strain_energy",
    "volume_overlap_fraction",
]

"""Structure, ligand and manifest input."""

from pathlib import Path

from cofoldbench.structure import ComplexStructure, Ligand

from .manifest import (
    BenchmarkManifest,
    ManifestEntry,
    PoseRef,
    Rejection,
    filter_by_release_date,
    load_manifest,
    manifest_from_dict,
    manifest_to_dict,
    normalize_manifest,
    normalize_poses,
    template_eligible,
)
from .protein import parse_protein_structure
from .sdf import parse_ligand


def structure_format(path: Path | str) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in (".cif", ".mmcif"):
        return "mmcif"
    if suffix in (".pdb", ".ent"):
        return "pdb"
    if suffix in (".sdf", ".mol"):
        return suffix[1:]
    raise ValueError(f"cannot infer file format from {path}")


def load_complex(protein_path: Path | str, ligand_path: Path | str | None) -> ComplexStructure:
    """Read a protein file and, if given, attach the ligand from an SDF/MOL file."""
    protein_path = Path(protein_path)
    structure = parse_protein_structure(protein_path.read_bytes(), structure_format(protein_path))
    if ligand_path is None:
        return structure
    ligand_path = Path(ligand_path)
    graph, coords = parse_ligand(ligand_path.read_bytes(), structure_format(ligand_path))
    return structure.with_ligand(Ligand(graph, coords, graph.name or "LIG"))


__all__ = [
    "BenchmarkManifest",
    "ManifestEntry",
    "PoseRef",
    "Rejection",
    "filter_by_release_date",
    "load_complex",
    "load_manifest",
    "manifest_from_dict",
    "manifest_to_dict",
    "normalize_manifest",
    "normalize_poses",
    "parse_ligand",
    "parse_protein_structure",
    "structure_format",
    "template_eligible",
]

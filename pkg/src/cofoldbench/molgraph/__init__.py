from .fingerprint import Fingerprint, circular_fingerprint, tanimoto
from .graph import AROMATIC, Atom, Bond, MolecularGraph, build_graph
from .iso import AutomorphismSet, automorphisms, graphs_match, is_automorphism, refine_colors
from .rings import aromatic_rings, aromatize, perceive_rings

__all__ = [
    "AROMATIC",
    "Atom",
    "AutomorphismSet",
    "Bond",
    "Fingerprint",
    "MolecularGraph",
    "aromatic_rings",
    "aromatize",
    "automorphisms",
    "build_graph",
    "circular_fingerprint",
    "graphs_match",
    "is_automorphism",
    "perceive_rings",
    "refine_colors",
    "tanimoto",
]

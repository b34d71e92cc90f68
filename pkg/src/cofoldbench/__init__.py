"""Evaluation harness for protein-ligand cofolding poses."""

__version__ = "0.1.0"

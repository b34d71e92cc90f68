"""Exception types raised by the benchmark toolkit."""

from __future__ import annotations


class BenchError(Exception):
    """Base class for every error the toolkit raises on purpose."""


class ParseError(BenchError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyStructureError(BenchError):
    pass


class UnknownElementError(ParseError):
    pass


class TopologyError(BenchError):
    """Predicted and reference ligand graphs are not isomorphic."""


class CoverageError(BenchError):
    """A residue or atom needed for the metric is missing from the prediction."""


class DegenerateGeometryError(BenchError):
    pass


class EmptySiteError(BenchError):
    """No protein residue lies near the reference ligand."""


class ManifestError(BenchError):
    pass

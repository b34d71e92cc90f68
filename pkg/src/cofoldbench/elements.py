"""Periodic table lookups: symbols, radii and allowed valences.

Radii come from ``data/elements.json``; elements without a tabulated radius
fall back to the file's default and a warning is logged once per element.
"""

from __future__ import annotations

import functools
import json
import logging
from importlib import resources

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=None)
def _table() -> dict:
    raw = resources.files("cofoldbench").joinpath("data/elements.json").read_text()
    return json.loads(raw)


@functools.lru_cache(maxsize=None)
def _by_symbol() -> dict[str, dict]:
    return {row["symbol"].upper(): row for row in _table()["elements"]}


@functools.lru_cache(maxsize=None)
def _by_number() -> dict[int, dict]:
    return {row["number"]: row for row in _table()["elements"]}


def radii_version() -> str:
    return _table()["version"]


def normalize_symbol(symbol: str) -> str | None:
    """Return the canonical capitalisation of ``symbol`` or None if unknown.

    Deuterium is folded into hydrogen.
    """
    key = symbol.strip().upper()
    if key == "D":
        key = "H"
    row = _by_symbol().get(key)
    return row["symbol"] if row else None


def is_element(symbol: str) -> bool:
    return normalize_symbol(symbol) is not None


def atomic_number(symbol: str) -> int:
    row = _by_symbol().get(symbol.upper())
    if row is None:
        raise KeyError(symbol)
    return row["number"]


def symbol_for(number: int) -> str:
    return _by_number()[number]["symbol"]


_warned: set[tuple[str, str]] = set()


def _radius(symbol: str, kind: str) -> float:
    row = _by_symbol().get(symbol.upper())
    if row is not None and kind in row:
        return row[kind]
    fallback = _table()["fallback"][kind]
    if (symbol, kind) not in _warned:
        _warned.add((symbol, kind))
        logger.warning("no %s radius for %r, using %.2f A", kind, symbol, fallback)
    return fallback


def covalent_radius(symbol: str) -> float:
    return _radius(symbol, "covalent")


def vdw_radius(symbol: str) -> float:
    return _radius(symbol, "vdw")


# Allowed total valences (bond orders plus hydrogens) of neutral atoms.
# Elements missing here (metals, noble gases) are not valence-checked.
_VALENCES: dict[str, tuple[int, ...]] = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "F": (1,),
    "Si": (4,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "Cl": (1,),
    "Ge": (4,),
    "As": (3, 5),
    "Se": (2, 4, 6),
    "Br": (1,),
    "Te": (2, 4, 6),
    "I": (1, 3, 5),
}


def allowed_valences(symbol: str, charge: int = 0) -> tuple[int, ...] | None:
    """Valences permitted for ``symbol`` carrying formal ``charge``.

    Charged main-group atoms take the valences of their isoelectronic neutral
    neighbour in the periodic table (N+ behaves like C, O- like F). Returns
    None when the element is not valence-checked.
    """
    if symbol not in _VALENCES:
        return None
    if charge == 0:
        return _VALENCES[symbol]
    number = atomic_number(symbol) - charge
    if number < 1 or number > 118:
        return None
    partner = symbol_for(number)
    if partner in _VALENCES:
        return _VALENCES[partner]
    if partner in ("He", "Ne", "Ar", "Kr", "Xe"):
        return (0,)
    return None

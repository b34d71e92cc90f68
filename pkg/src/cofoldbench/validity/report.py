"""Check names, configuration and report containers."""

from __future__ import annotations

from dataclasses import dataclass, fields

CHECK_NAMES: tuple[str, ...] = (
    "mol_pred_loaded",
    "mol_true_loaded",
    "mol_cond_loaded",
    "sanitization",
    "all_atoms_connected",
    "molecular_formula",
    "molecular_bonds",
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


@dataclass(frozen=True)
class CheckConfig:
    bond_len_rel_tol: float = 0.25
    angle_rel_tol: float = 0.25
    clash_vdw_factor: float = 0.70
    clash_min_bond_separation: int = 4
    inter_vdw_factor: float = 0.75
    max_lig_prot_dist: float = 5.0
    flatness_tol: float = 0.25
    volume_overlap_max: float = 0.075
    volume_vdw_scale: float = 0.8
    grid_spacing: float = 0.25
    strain_ratio_max: float = 100.0
    strain_floor: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value <= 0:
                raise ValueError(f"{f.name} must be positive, got {value}")
        for name in ("clash_vdw_factor", "inter_vdw_factor", "volume_overlap_max", "volume_vdw_scale"):
            if getattr(self, name) > 1:
                raise ValueError(f"{name} must lie in (0, 1]")

    @classmethod
    def from_mapping(cls, values: dict) -> "CheckConfig":
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, value in values.items():
            if key not in known:
                raise KeyError(f"unknown check option {key!r}")
            kwargs[key] = int(value) if key == "clash_min_bond_separation" else float(value)
        return cls(**kwargs)


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    value: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"pass": self.passed, "value": self.value, "detail": self.detail}


class CheckReport:
    """All 24 check outcomes in canonical order; PB-valid is their conjunction."""

    __slots__ = ("results",)

    def __init__(self, results: dict[str, CheckResult]):
        missing = [n for n in CHECK_NAMES if n not in results]
        extra = [n for n in results if n not in CHECK_NAMES]
        if missing or extra:
            raise ValueError(f"report mismatch: missing={missing} extra={extra}")
        self.results = {name: results[name] for name in CHECK_NAMES}

    @property
    def pb_valid(self) -> bool:
        return all(r.passed for r in self.results.values())

    def __getitem__(self, name: str) -> CheckResult:
        return self.results[name]

    def __iter__(self):
        return iter(self.results.items())

    def __len__(self) -> int:
        return len(self.results)

    def __eq__(self, other) -> bool:
        return isinstance(other, CheckReport) and self.results == other.results

    def failed(self) -> list[str]:
        return [n for n, r in self.results.items() if not r.passed]

    def to_dict(self) -> dict:
        return {
            "pb_valid": self.pb_valid,
            "checks": {n: r.to_dict() for n, r in self.results.items()},
        }

    def __repr__(self) -> str:
        return f"CheckReport(pb_valid={self.pb_valid}, failed={self.failed()})"

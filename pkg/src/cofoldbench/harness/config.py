"""Run configuration and its key-value file format.

The config file has one ``key = value`` pair per line. Blank lines and lines
starting with ``#`` are ignored. Recognised keys::

    method = my-model
    k_values = 1, 5, 20
    bootstrap_iters = 1000
    seed = 0
    workers = 1
    out = results/run1
    required_poses = 20
    site_cutoff = 10.0
    significance = ttest            # or: bootstrap
    lddt.inclusion_radius = 6.0
    lddt.thresholds = 0.5, 1, 2, 4
    check.<field> = <number>        # any CheckConfig field

``COFOLDBENCH_WORKERS`` and ``COFOLDBENCH_OUT`` override ``workers`` and
``out`` from the file.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from cofoldbench.errors import BenchError
from cofoldbench.geom import DEFAULT_SITE_CUTOFF, LddtConfig
from cofoldbench.stats import DEFAULT_BOOTSTRAP_ITERS
from cofoldbench.validity import CheckConfig

CRITERIA = ("rmsd<2", "rmsd<2&pb", "rmsd<1", "rmsd<1&pb", "lddt_pli")
BINARY_CRITERIA = CRITERIA[:4]
SIGNIFICANCE_MODES = ("ttest", "bootstrap")

ENV_WORKERS = "COFOLDBENCH_WORKERS"
ENV_OUT = "COFOLDBENCH_OUT"


class ConfigError(BenchError):
    """Malformed configuration file or value."""


@dataclass(frozen=True)
class RunConfig:
    method: str = "model"
    k_values: tuple[int, ...] = (1, 5, 20)
    criteria: tuple[str, ...] = CRITERIA
    bootstrap_iters: int = DEFAULT_BOOTSTRAP_ITERS
    seed: int = 0
    workers: int = 1
    out: str | None = None
    required_poses: int = 20
    site_cutoff: float = DEFAULT_SITE_CUTOFF
    significance: str = "ttest"
    checks: CheckConfig = field(default_factory=CheckConfig)
    lddt: LddtConfig = field(default_factory=LddtConfig)

    def __post_init__(self):
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ConfigError("k_values must be positive integers")
        if any(k > self.required_poses for k in self.k_values):
            raise ConfigError(f"k_values must not exceed required_poses={self.required_poses}")
        if list(self.k_values) != sorted(set(self.k_values)):
            raise ConfigError("k_values must be strictly increasing")
        unknown = set(self.criteria) - set(CRITERIA)
        if unknown:
            raise ConfigError(f"unknown criteria {sorted(unknown)}")
        if self.bootstrap_iters < 1:
            raise ConfigError("bootstrap_iters must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.significance not in SIGNIFICANCE_MODES:
            raise ConfigError(f"significance must be one of {SIGNIFICANCE_MODES}")

    def to_dict(self) -> dict:
        """Everything that affects results (``workers`` and ``out`` do not)."""
        d = asdict(self)
        d.pop("workers")
        d.pop("out")
        d["k_values"] = list(self.k_values)
        d["criteria"] = list(self.criteria)
        d["lddt"]["thresholds"] = list(self.lddt.thresholds)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _int_list(value: str) -> tuple[int, ...]:
    return tuple(int(v) for v in value.replace(",", " ").split())


def _float_list(value: str) -> tuple[float, ...]:
    return tuple(float(v) for v in value.replace(",", " ").split())


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def config_from_mapping(values: dict[str, str], base: RunConfig | None = None) -> RunConfig:
    cfg = base or RunConfig()
    top, check, lddt = {}, {}, {}
    try:
        for key, value in values.items():
            if key.startswith("check."):
                check[key[6:]] = value
            elif key == "lddt.inclusion_radius":
                lddt["inclusion_radius"] = float(value)
            elif key == "lddt.thresholds":
                lddt["thresholds"] = _float_list(value)
            elif key == "k_values":
                top[key] = _int_list(value)
            elif key == "criteria":
                top[key] = tuple(v.strip() for v in value.split(",") if v.strip())
            elif key in ("bootstrap_iters", "seed", "workers", "required_poses"):
                top[key] = int(value)
            elif key == "site_cutoff":
                top[key] = float(value)
            elif key in ("method", "out", "significance"):
                top[key] = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
        if check:
            top["checks"] = CheckConfig.from_mapping({**asdict(cfg.checks), **check})
        if lddt:
            top["lddt"] = replace(cfg.lddt, **lddt)
        return replace(cfg, **top)
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None


def apply_env(cfg: RunConfig, environ=None) -> RunConfig:
    env = os.environ if environ is None else environ
    updates = {}
    if env.get(ENV_WORKERS):
        try:
            updates["workers"] = int(env[ENV_WORKERS])
        except ValueError:
            raise ConfigError(f"{ENV_WORKERS} must be an integer") from None
    if env.get(ENV_OUT):
        updates["out"] = env[ENV_OUT]
    return replace(cfg, **updates) if updates else cfg


def load_config(path: Path | str | None = None, environ=None) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        cfg = config_from_mapping(parse_config_text(Path(path).read_text()), cfg)
    return apply_env(cfg, environ)


def check_fields() -> list[str]:
    return [f.name for f in fields(CheckConfig)]

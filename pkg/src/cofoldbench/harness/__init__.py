"""Benchmark orchestration, stratification, comparison, reporting and CLI."""

from .compare import Comparison, EntryMismatchError, compare_methods
from .config import CRITERIA, ConfigError, RunConfig, load_config, parse_config_text
from .report import render_report
from .run import PoseMetrics, RunResults, load_results, run_benchmark, write_results
from .stratify import StratificationSpec, stratify

__all__ = [
    "CRITERIA",
    "Comparison",
    "ConfigError",
    "EntryMismatchError",
    "PoseMetrics",
    "RunConfig",
    "RunResults",
    "StratificationSpec",
    "compare_methods",
    "load_config",
    "load_results",
    "parse_config_text",
    "render_report",
    "run_benchmark",
    "stratify",
    "write_results",
]

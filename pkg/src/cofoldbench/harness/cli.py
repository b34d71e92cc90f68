"""Command-line entry point ``bench``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import sys
from pathlib import Path

from cofoldbench import __version__
from cofoldbench.chemio import filter_by_release_date, load_complex, load_manifest
from cofoldbench.errors import BenchError
from cofoldbench.geom import LddtConfig, bisy_rmsd_detail, lddt_pli
from cofoldbench.pocket import select_pocket_residues
from cofoldbench.validity import run_all_checks

from .compare import compare_methods
from .config import CRITERIA, ConfigError, load_config
from .report import render_report
from .run import load_results, run_benchmark
from .stratify import AXES, StratificationSpec, stratify

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

logger = logging.getLogger("cofoldbench")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text}") from None


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = str(args.workers)
    if args.method is not None:
        overrides["method"] = args.method
    if overrides:
        from .config import config_from_mapping

        cfg = config_from_mapping(overrides, cfg)
    out = args.out or cfg.out
    if out is None:
        raise UsageError("no output directory: pass --out or set COFOLDBENCH_OUT")
    manifest = load_manifest(args.manifest)
    if args.released_on_or_after:
        manifest = filter_by_release_date(manifest, args.released_on_or_after, "on_or_after")
    if args.released_after:
        manifest = filter_by_release_date(manifest, args.released_after, "after")
    results = run_benchmark(manifest, cfg, out)
    for a in results.aggregates:
        mean = "n/a" if a.mean is None else f"{a.mean:.4f}"
        sem = "n/a" if a.sem is None else f"{a.sem:.4f}"
        print(f"{a.metric_name:>10s}  best@{a.k:<3d} {mean} ± {sem}  (n={a.n_structures})")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_score(args) -> int:
    truth = load_complex(args.truth, args.truth_ligand)
    pred = load_complex(args.pred, args.pred_ligand)
    detail = bisy_rmsd_detail(truth, pred)
    out = {"rmsd": detail.rmsd, "naive_rmsd": detail.naive_rmsd, "site_residues": [str(k) for k in detail.site]}
    if args.lddt:
        out["lddt_pli"] = lddt_pli(truth, pred, LddtConfig())
    if args.checks:
        out["checks"] = run_all_checks(truth, pred).to_dict()
    _emit(out)
    return EXIT_OK


def cmd_validate(args) -> int:
    truth = load_complex(args.truth, args.truth_ligand)
    pred = load_complex(args.pred, args.pred_ligand)
    cfg = load_config(args.config).checks
    _emit(run_all_checks(truth, pred, cfg).to_dict())
    return EXIT_OK


def cmd_pocket(args) -> int:
    truth = load_complex(args.truth, args.truth_ligand)
    sel = select_pocket_residues(truth, mode=args.mode)
    _emit(sel.to_dict(args.entry_id or Path(args.truth).stem))
    return EXIT_OK


def cmd_stratify(args) -> int:
    results = load_results(args.results)
    edges = tuple(float(x) for x in args.edges.split(",")) if args.edges else None
    spec = StratificationSpec(args.axis, edges) if edges else StratificationSpec.default(args.axis)
    annotations = None
    if args.manifest:
        annotations = {e.id: dict(e.annotations or {}) for e in load_manifest(args.manifest).entries}
    _emit(stratify(results, spec, args.criterion, args.k, annotations))
    return EXIT_OK


def cmd_compare(args) -> int:
    a = load_results(args.a)
    b = load_results(args.b)
    test = "bootstrap" if args.bootstrap_p else "ttest"
    cmp = compare_methods(a, b, args.k, args.criterion, method=test, seed=a.config.seed)
    _emit({"a": a.method, "b": b.method, **cmp.to_dict()})
    return EXIT_OK


def cmd_report(args) -> int:
    runs = [load_results(d) for d in args.results]
    for path in render_report(runs, args.out, k=args.k, test="bootstrap" if args.bootstrap_p else "ttest"):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bench", description="Protein-ligand cofolding benchmark harness.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="score every pose in a manifest and aggregate")
    r.add_argument("--manifest", required=True)
    r.add_argument("--config", help="key = value config file")
    r.add_argument("--out", help="output directory (overrides config and COFOLDBENCH_OUT)")
    r.add_argument("--workers", type=int)
    r.add_argument("--method", help="method name recorded in the outputs")
    r.add_argument("--released-on-or-after", type=_date, metavar="DATE")
    r.add_argument("--released-after", type=_date, metavar="DATE")
    r.set_defaults(func=cmd_run)

    def complex_args(sp, pred=True):
        sp.add_argument("--truth", required=True, help="reference protein (PDB/mmCIF)")
        sp.add_argument("--truth-ligand", required=True, help="reference ligand (SDF)")
        if pred:
            sp.add_argument("--pred", required=True, help="predicted protein (PDB/mmCIF)")
            sp.add_argument("--pred-ligand", required=True, help="predicted ligand (SDF)")

    s = sub.add_parser("score", help="RMSD (and optionally lDDT-PLI and checks) for one pose")
    complex_args(s)
    s.add_argument("--lddt", action="store_true")
    s.add_argument("--checks", action="store_true")
    s.set_defaults(func=cmd_score)

    v = sub.add_parser("validate", help="run the 24 validity checks on one pose")
    complex_args(v)
    v.add_argument("--config")
    v.set_defaults(func=cmd_validate)

    pk = sub.add_parser("pocket", help="select pocket residues for conditional inference")
    complex_args(pk, pred=False)
    pk.add_argument("--entry-id")
    pk.add_argument("--mode", choices=("residue_min", "pairs"), default="residue_min")
    pk.set_defaults(func=cmd_pocket)

    st = sub.add_parser("stratify", help="per-bin aggregates from a run directory")
    st.add_argument("--results", required=True)
    st.add_argument("--axis", required=True, choices=AXES)
    st.add_argument("--criterion", choices=CRITERIA, default="rmsd<2")
    st.add_argument("--k", type=int, default=5)
    st.add_argument("--edges", help="comma-separated bin edges")
    st.add_argument("--manifest", help="take annotations from this manifest")
    st.set_defaults(func=cmd_stratify)

    c = sub.add_parser("compare", help="one-sided paired test of run A over run B")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--criterion", choices=CRITERIA, default="rmsd<2")
    c.add_argument("--k", type=int, default=5)
    c.add_argument("--bootstrap-p", action="store_true", help="use the paired bootstrap instead of the t-test")
    c.set_defaults(func=cmd_compare)

    rp = sub.add_parser("report", help="render HTML/CSV/SVG for one or more run directories")
    rp.add_argument("results", nargs="+")
    rp.add_argument("--out", required=True)
    rp.add_argument("--k", type=int)
    rp.add_argument("--bootstrap-p", action="store_true")
    rp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BenchError, OSError, ValueError, KeyError) as exc:
        print(f"bench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

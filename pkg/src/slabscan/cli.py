"""Command line: plan, coverage, experiment, render.

Exit codes: 0 success, 1 input error, 2 some triangles left without a scan point.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .documents import (
    COVERAGE_SCHEMA,
    COVERAGE_SCHEMA_ID,
    PLAN_SCHEMA_ID,
    InputError,
    coverage_block,
    document_discs,
    document_scan_points,
    dumps,
    load_discs,
    load_document,
    load_plan,
    load_points,
    plan_document,
    validate,
)
from .geom import GeometryError
from .render import LAYERS, render_svg
from .report import DEFAULT_RESOLUTION_DEG, pct, run_experiment, summary_text, write_experiment
from .slabs import plan_scans
from .visibility import coverage

EXIT_OK, EXIT_INPUT, EXIT_INCOMPLETE = 0, 1, 2


def _resolution(deg: float) -> float:
    if not deg > 0:
        raise InputError("resolution must be positive")
    return math.radians(deg)


def cmd_plan(path, resolution_deg: float = DEFAULT_RESOLUTION_DEG, threshold: float = 0.0,
             inside_hull: bool = True, seed=None) -> tuple:
    """Plan scan points for a disc file. Returns (plan document, exit code)."""
    discs = load_discs(path)
    planning = plan_scans(discs, inside_hull=inside_hull)
    rep = coverage(planning.plan.scan_points, discs, _resolution(resolution_deg), threshold)
    doc = plan_document(planning, rep, resolution_deg, seed=seed, inside_hull=inside_hull)
    return doc, EXIT_INCOMPLETE if planning.plan.uncovered_triangles else EXIT_OK


def cmd_coverage(source, discs_path=None, single: bool = False,
                 resolution_deg: float = DEFAULT_RESOLUTION_DEG, threshold: float = 0.0) -> tuple:
    """Coverage of the scan points in a plan document, or of a point file over a disc file."""
    res = _resolution(resolution_deg)
    if discs_path is None:
        doc = load_document(source)
        if not isinstance(doc, dict) or doc.get("schema") != PLAN_SCHEMA_ID:
            raise InputError(f"{source}: expected a {PLAN_SCHEMA_ID} document, or pass --discs")
        doc = load_plan(source)
        discs, points = document_discs(doc), document_scan_points(doc)
    else:
        discs, points = load_discs(discs_path), load_points(source)
    groups = [[q] for q in points] if single else [points]
    reports = [coverage_block(coverage(g, discs, res, threshold), g) for g in groups]
    out = {
        "schema": COVERAGE_SCHEMA_ID,
        "mode": "single" if single else "multi",
        "resolution_deg": resolution_deg,
        "threshold": threshold,
        "reports": reports,
    }
    validate(out, COVERAGE_SCHEMA)
    return out, EXIT_OK


def cmd_experiment(preset: int, seed=None, spacing: float = 2.0, resolution_deg: float = DEFAULT_RESOLUTION_DEG,
                   threshold: float = 0.0, out_dir=None, sweep: bool = True) -> tuple:
    _resolution(resolution_deg)
    try:
        doc, plan_doc = run_experiment(preset, seed, spacing, resolution_deg, threshold, sweep=sweep)
    except ValueError as exc:
        if isinstance(exc, GeometryError):
            raise
        raise InputError(str(exc)) from None
    if out_dir is not None:
        write_experiment(doc, plan_doc, out_dir)
    return doc, EXIT_OK


def _emit(text: str, out) -> None:
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _coverage_text(doc: dict) -> str:
    lines = []
    for k, r in enumerate(doc["reports"]):
        label = f"scan {k}" if doc["mode"] == "single" else "all scans"
        lines.append(f"{label}: mean {pct(r['mean'], r['sd'])}  detected {r['detected']}  "
                     f"detected mean {pct(r['detected_mean'], r['detected_sd'])}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slabscan", description="Scan positions that light up every stem in a plot.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--resolution", type=float, default=DEFAULT_RESOLUTION_DEG, metavar="DEG",
                        help="angular sampling step in degrees (default %(default)s)")
        sp.add_argument("--threshold", type=float, default=0.0,
                        help="lit fraction above which a disc counts as detected")

    sp = sub.add_parser("plan", help="triangulate, build feasible regions and choose scan points")
    sp.add_argument("discs", help="disc file: CSV with header x,y,r or JSON records")
    sp.add_argument("-o", "--output", help="plan document path (default stdout)")
    sp.add_argument("--svg", help="also write a drawing of the plan here")
    sp.add_argument("--outside-hull", action="store_true", help="do not clip regions to the disc hull")
    sp.add_argument("--seed", type=int, default=None, help="recorded in the metadata")
    common(sp)

    sp = sub.add_parser("coverage", help="lit boundary fractions for a set of scan points")
    sp.add_argument("source", help="plan document, or a point file (x,y CSV or JSON) with --discs")
    sp.add_argument("--discs", help="disc file for a point file source")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--single", action="store_true", help="one report per scan point")
    mode.add_argument("--multi", action="store_true", help="all scan points together (default)")
    sp.add_argument("-o", "--output", help="coverage document path")
    common(sp)

    sp = sub.add_parser("experiment", help="run one of the five preset stem layouts")
    sp.add_argument("--preset", type=int, required=True, choices=range(1, 6), metavar="{1..5}")
    sp.add_argument("--seed", type=int, default=None, help="override the preset seed")
    sp.add_argument("--spacing", type=float, default=2.0, help="grid spacing in meters (default %(default)s)")
    sp.add_argument("--no-sweep", action="store_true", help="skip the spacing sensitivity sweep")
    sp.add_argument("-o", "--output", help="directory for report.json, coverage.csv, plan.json, plan.svg, coverage.png")
    common(sp)

    sp = sub.add_parser("render", help="draw a plan document as SVG")
    sp.add_argument("plan", help="plan document")
    sp.add_argument("--layers", default=",".join(LAYERS),
                    help=f"comma separated subset of {','.join(LAYERS)}; empty for discs only")
    sp.add_argument("--resolution", type=float, default=None, metavar="DEG",
                    help="arc sampling step; defaults to the document's")
    sp.add_argument("-o", "--output", help="SVG path (default stdout)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plan":
            doc, code = cmd_plan(args.discs, args.resolution, args.threshold, not args.outside_hull, args.seed)
            _emit(dumps(doc), args.output)
            if args.svg:
                Path(args.svg).write_text(render_svg(doc))
            c = doc["coverage"]
            print(f"{len(doc['plan']['groups'])} scan points, mean {pct(c['mean'], c['sd'])}", file=sys.stderr)
            if code == EXIT_INCOMPLETE:
                print(f"uncovered triangles: {doc['plan']['uncovered_triangles']}", file=sys.stderr)
            return code
        if args.command == "coverage":
            doc, code = cmd_coverage(args.source, args.discs, args.single, args.resolution, args.threshold)
            if args.output:
                _emit(dumps(doc), args.output)
            sys.stdout.write(_coverage_text(doc))
            return code
        if args.command == "experiment":
            doc, code = cmd_experiment(args.preset, args.seed, args.spacing, args.resolution, args.threshold,
                                       args.output, sweep=not args.no_sweep)
            sys.stdout.write(summary_text(doc))
            return code
        if args.command == "render":
            doc = load_plan(args.plan)
            layers = [s.strip() for s in args.layers.split(",") if s.strip()]
            res = None if args.resolution is None else _resolution(args.resolution)
            _emit(render_svg(doc, layers, res), args.output)
            return EXIT_OK
    except (InputError, GeometryError, ValueError) as exc:
        print(f"slabscan: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

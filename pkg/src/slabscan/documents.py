"""Disc files, plan documents and coverage documents."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import jsonschema

from . import __version__
from .geom import EPS, EPS_AREA, Disc, GeometryError, OverlapError, Point, check_nonoverlapping
from .slabs import Planning
from .visibility import CoverageReport

PLAN_SCHEMA_ID = "slabscan.plan/1"
COVERAGE_SCHEMA_ID = "slabscan.coverage/1"
EXPERIMENT_SCHEMA_ID = "slabscan.experiment/1"


class InputError(ValueError):
    """Unreadable or invalid input file."""


class DiscFileError(InputError):
    def __init__(self, path, message, line=None, column=None):
        self.path = str(path)
        self.line = line
        self.column = column
        where = str(path)
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


_xy = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_ring = {"type": "array", "items": _xy, "minItems": 3}
_disc = {
    "type": "object",
    "properties": {"x": {"type": "number"}, "y": {"type": "number"}, "r": {"type": "number", "exclusiveMinimum": 0}},
    "required": ["x", "y", "r"],
}

COVERAGE_BLOCK_SCHEMA = {
    "type": "object",
    "properties": {
        "scan_points": {"type": "array", "items": _xy},
        "per_disc": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"disc": {"type": "integer"}, "fraction": {"type": "number", "minimum": 0, "maximum": 1}},
                "required": ["disc", "fraction"],
            },
        },
        "mean": {"type": "number"},
        "sd": {"type": "number"},
        "detected": {"type": "integer"},
        "detected_mean": {"type": "number"},
        "detected_sd": {"type": "number"},
    },
    "required": ["scan_points", "per_disc", "mean", "sd", "detected", "detected_mean", "detected_sd"],
}

PLAN_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": PLAN_SCHEMA_ID},
        "discs": {"type": "array", "items": _disc, "minItems": 3},
        "mesh": {
            "type": "object",
            "properties": {
                "triangles": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}, "minItems": 3, "maxItems": 3}},
                "unrepresented": {"type": "array", "items": {"type": "integer"}},
                "degenerate": {"type": "boolean"},
            },
            "required": ["triangles", "unrepresented", "degenerate"],
        },
        "regions": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "triangle": {"type": "integer"},
                    "discs": {"type": "array", "items": {"type": "integer"}},
                    "shape": {"enum": [4, 5, 6]},
                    "polygon": _ring,
                },
                "required": ["triangle", "discs", "shape", "polygon"],
            },
        },
        "failures": {"type": "array", "items": {"type": "object", "required": ["triangle", "reason"]}},
        "plan": {
            "type": "object",
            "properties": {
                "groups": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "members": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                            "region": _ring,
                            "scan_point": _xy,
                        },
                        "required": ["members", "region", "scan_point"],
                    },
                },
                "uncovered_triangles": {"type": "array", "items": {"type": "integer"}},
            },
            "required": ["groups", "uncovered_triangles"],
        },
        "coverage": COVERAGE_BLOCK_SCHEMA,
        "metadata": {"type": "object", "required": ["tool", "version", "eps", "resolution_deg"]},
    },
    "required": ["schema", "discs", "mesh", "regions", "plan", "coverage", "metadata"],
}

COVERAGE_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": COVERAGE_SCHEMA_ID},
        "mode": {"enum": ["single", "multi"]},
        "resolution_deg": {"type": "number", "exclusiveMinimum": 0},
        "threshold": {"type": "number"},
        "reports": {"type": "array", "items": COVERAGE_BLOCK_SCHEMA},
    },
    "required": ["schema", "mode", "resolution_deg", "threshold", "reports"],
}

EXPERIMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": EXPERIMENT_SCHEMA_ID},
        "preset": {"type": "integer", "minimum": 1, "maximum": 5},
        "spec": {"type": "object"},
        "assumptions": {"type": "object"},
        "multi": COVERAGE_BLOCK_SCHEMA,
        "single": {"type": ["array", "null"], "items": COVERAGE_BLOCK_SCHEMA},
        "spacing_sensitivity": {"type": "array"},
        "plan": {"type": "object"},
        "metadata": {"type": "object"},
    },
    "required": ["schema", "preset", "spec", "assumptions", "multi", "single", "spacing_sensitivity", "plan", "metadata"],
}


def _validate_discs(path, discs, lines=None):
    for k, d in enumerate(discs):
        if not d.radius > 0:
            raise DiscFileError(path, "radius must be positive", lines[k] if lines else None)
    try:
        check_nonoverlapping(discs)
    except OverlapError as exc:
        raise DiscFileError(path, str(exc)) from exc


def _disc(path, x, y, r, line=None, column=None):
    try:
        x, y, r = float(x), float(y), float(r)
    except (TypeError, ValueError):
        raise DiscFileError(path, f"non-numeric value in record ({x!r}, {y!r}, {r!r})", line, column) from None
    if not all(math.isfinite(v) for v in (x, y, r)):
        raise DiscFileError(path, "non-finite value", line, column)
    if r <= 0:
        raise DiscFileError(path, "radius must be positive", line, column)
    return Disc.at(x, y, r)


def parse_discs_csv(text: str, path="<csv>") -> list:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DiscFileError(path, "empty file", 1)
    header = [h.strip().lower() for h in rows[0]]
    if header != ["x", "y", "r"]:
        raise DiscFileError(path, f"expected header x,y,r, got {','.join(rows[0])}", 1, 1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise DiscFileError(path, f"expected 3 fields, got {len(row)}", lineno)
        out.append(_disc(path, *row, line=lineno))
    return out


def parse_discs_json(text: str, path="<json>") -> list:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiscFileError(path, exc.msg, exc.lineno, exc.colno) from None
    records = doc.get("discs") if isinstance(doc, dict) else doc
    if not isinstance(records, list):
        raise DiscFileError(path, 'expected a list of {"x", "y", "r"} records under "discs"')
    out = []
    for k, rec in enumerate(records):
        if not isinstance(rec, dict) or not {"x", "y", "r"} <= rec.keys():
            raise DiscFileError(path, f"record {k} needs keys x, y, r")
        try:
            out.append(_disc(path, rec["x"], rec["y"], rec["r"]))
        except DiscFileError as exc:
            raise DiscFileError(path, f"record {k}: {str(exc).split(': ', 1)[1]}") from None
    return out


def load_discs(path) -> list:
    """Read discs from a CSV file (header ``x,y,r``) or a JSON record list; meters."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DiscFileError(path, exc.strerror or str(exc)) from None
    stripped = text.lstrip()
    if path.suffix.lower() == ".json" or stripped.startswith(("{", "[")):
        discs = parse_discs_json(text, path)
    else:
        discs = parse_discs_csv(text, path)
    _validate_discs(path, discs)
    return discs


def _pt(p):
    return [float(p[0]), float(p[1])]


def coverage_block(report: CoverageReport, scan_points) -> dict:
    return {
        "scan_points": [_pt(q) for q in scan_points],
        "per_disc": [{"disc": int(k), "fraction": float(f)} for k, f in sorted(report.per_disc.items())],
        "mean": report.mean,
        "sd": report.sd,
        "detected": report.detected,
        "detected_mean": report.detected_mean,
        "detected_sd": report.detected_sd,
    }


def plan_document(planning: Planning, report: CoverageReport, resolution_deg: float,
                  seed=None, inside_hull: bool = True) -> dict:
    mesh = planning.mesh
    doc = {
        "schema": PLAN_SCHEMA_ID,
        "discs": [{"x": d.center.x, "y": d.center.y, "r": d.radius} for d in planning.discs],
        "mesh": {
            "triangles": [list(t) for t in mesh.triangles],
            "unrepresented": list(mesh.unrepresented),
            "degenerate": mesh.degenerate,
        },
        "regions": [
            {
                "triangle": t,
                "discs": list(r.triangle),
                "shape": r.shape,
                "polygon": [_pt(v) for v in r.polygon.vertices],
            }
            for t, r in sorted(planning.regions.items())
        ],
        "failures": [{"triangle": t, "reason": why} for t, why in sorted(planning.failures.items())],
        "plan": {
            "groups": [
                {
                    "members": list(g.members),
                    "region": [_pt(v) for v in g.region.vertices],
                    "scan_point": _pt(g.scan_point),
                }
                for g in planning.plan.groups
            ],
            "uncovered_triangles": list(planning.plan.uncovered_triangles),
        },
        "coverage": coverage_block(report, planning.plan.scan_points),
        "metadata": {
            "tool": "slabscan",
            "version": __version__,
            "eps": EPS,
            "eps_area": EPS_AREA,
            "resolution_deg": resolution_deg,
            "threshold": report.threshold,
            "seed": seed,
            "inside_hull": inside_hull,
        },
    }
    validate(doc, PLAN_SCHEMA)
    return doc


def validate(doc: dict, schema: dict) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise InputError(f"document does not match {schema['properties']['schema']['const']}: {exc.message}") from None


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def load_document(path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise DiscFileError(path, exc.msg, exc.lineno, exc.colno) from None
    return doc


def load_plan(path) -> dict:
    doc = load_document(path)
    if not isinstance(doc, dict) or doc.get("schema") != PLAN_SCHEMA_ID:
        raise InputError(f"{path}: not a {PLAN_SCHEMA_ID} document")
    validate(doc, PLAN_SCHEMA)
    return doc


def document_discs(doc: dict) -> list:
    return [Disc.at(d["x"], d["y"], d["r"]) for d in doc["discs"]]


def document_scan_points(doc: dict) -> list:
    return [Point(*g["scan_point"]) for g in doc["plan"]["groups"]]


def load_points(path) -> list:
    """Scan points from CSV (header ``x,y``) or JSON (``{"points": [[x, y], ...]}``)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    if text.lstrip().startswith(("{", "[")):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DiscFileError(path, exc.msg, exc.lineno, exc.colno) from None
        pts = doc.get("points") if isinstance(doc, dict) else doc
        try:
            return [Point(*p) for p in pts]
        except (TypeError, ValueError, GeometryError) as exc:
            raise DiscFileError(path, f"bad point list: {exc}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip().lower() for h in rows[0]] != ["x", "y"]:
        raise DiscFileError(path, "expected header x,y", 1, 1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            out.append(Point(*row))
        except (TypeError, ValueError, GeometryError):
            raise DiscFileError(path, f"bad point {row}", lineno) from None
    return out

"""Experiment runner: forest, plan, multi and single scan coverage, files on disk."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import replace
from pathlib import Path

from . import __version__
from .documents import (
    EXPERIMENT_SCHEMA,
    EXPERIMENT_SCHEMA_ID,
    coverage_block,
    dumps,
    plan_document,
    validate,
)
from .render import render_svg
from .scenario import DEFAULT_SPACING, RNG_NAME, SINGLE_SCAN_PRESETS, experiment_presets, generate
from .slabs import plan_scans
from .visibility import coverage

SWEEP_SPACINGS = (1.5, 2.0, 2.5)
DEFAULT_RESOLUTION_DEG = 0.05

DETECTION_NOTE = (
    "detected = discs with lit fraction above the threshold; a stand-in for the "
    "physical detection step. detected_mean averages over detected discs only."
)


def pct(mean: float, sd: float) -> str:
    """Fractions as '77.83 ± 12.16' percent."""
    return f"{100 * mean:.2f} ± {100 * sd:.2f}"


def _multi(discs, resolution_deg, threshold):
    planning = plan_scans(discs)
    rep = coverage(planning.plan.scan_points, discs, math.radians(resolution_deg), threshold)
    return planning, rep


def spacing_sweep(preset: int, seed: int | None = None, spacings=SWEEP_SPACINGS,
                  resolution_deg: float = DEFAULT_RESOLUTION_DEG, threshold: float = 0.0) -> list:
    rows = []
    for s in spacings:
        spec = experiment_presets(s)[preset]
        if seed is not None:
            spec = replace(spec, seed=seed)
        planning, rep = _multi(generate(spec), resolution_deg, threshold)
        rows.append({
            "spacing": s,
            "groups": len(planning.plan.groups),
            "uncovered": len(planning.plan.uncovered_triangles),
            "mean": rep.mean,
            "sd": rep.sd,
        })
    return rows


def run_experiment(preset: int, seed: int | None = None, spacing: float = DEFAULT_SPACING,
                   resolution_deg: float = DEFAULT_RESOLUTION_DEG, threshold: float = 0.0,
                   sweep: bool = True) -> tuple:
    """Returns (report document, plan document)."""
    presets = experiment_presets(spacing)
    if preset not in presets:
        raise ValueError(f"preset must be one of {sorted(presets)}, got {preset}")
    spec = presets[preset]
    if seed is not None:
        spec = replace(spec, seed=seed)
    discs = generate(spec)
    planning, multi = _multi(discs, resolution_deg, threshold)
    res = math.radians(resolution_deg)
    single = None
    if preset in SINGLE_SCAN_PRESETS:
        single = [coverage_block(coverage([q], discs, res, threshold), [q]) for q in planning.plan.scan_points]
    plan_doc = plan_document(planning, multi, resolution_deg, seed=spec.seed)
    doc = {
        "schema": EXPERIMENT_SCHEMA_ID,
        "preset": preset,
        "spec": spec.to_dict(),
        "assumptions": {
            "spacing_m": spec.spacing,
            "spacing_note": "plot spacing is not reported for the physical plots; chosen default",
            "detection": DETECTION_NOTE,
            "threshold": threshold,
        },
        "multi": coverage_block(multi, planning.plan.scan_points),
        "single": single,
        "spacing_sensitivity": spacing_sweep(preset, seed, resolution_deg=resolution_deg,
                                             threshold=threshold) if sweep else [],
        "plan": {
            "groups": len(planning.plan.groups),
            "uncovered_triangles": list(planning.plan.uncovered_triangles),
            "triangles": len(planning.mesh.triangles),
        },
        "metadata": {
            "tool": "slabscan",
            "version": __version__,
            "rng": RNG_NAME,
            "seed": spec.seed,
            "resolution_deg": resolution_deg,
        },
    }
    validate(doc, EXPERIMENT_SCHEMA)
    return doc, plan_doc


def summary_text(doc: dict) -> str:
    m = doc["multi"]
    lines = [
        f"preset {doc['preset']}  spacing {doc['spec']['spacing']:.2f} m  seed {doc['metadata']['seed']}",
        f"multi  scans {len(m['scan_points'])}  mean {pct(m['mean'], m['sd'])}  "
        f"detected {m['detected']}  detected mean {pct(m['detected_mean'], m['detected_sd'])}",
    ]
    for k, s in enumerate(doc["single"] or []):
        lines.append(
            f"single {k}  mean {pct(s['mean'], s['sd'])}  detected {s['detected']}  "
            f"detected mean {pct(s['detected_mean'], s['detected_sd'])}"
        )
    for row in doc["spacing_sensitivity"]:
        lines.append(f"sweep  spacing {row['spacing']:.2f} m  mean {pct(row['mean'], row['sd'])}  groups {row['groups']}")
    return "\n".join(lines) + "\n"


def coverage_csv(doc: dict) -> str:
    """Per-disc fractions: one column for the multi scan, one per single scan."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    single = doc["single"] or []
    w.writerow(["disc", "multi"] + [f"single_{k}" for k in range(len(single))])
    for k, row in enumerate(doc["multi"]["per_disc"]):
        w.writerow([row["disc"], f"{row['fraction']:.6f}"] + [f"{s['per_disc'][k]['fraction']:.6f}" for s in single])
    return buf.getvalue()


def plot_coverage(doc: dict, plan_doc: dict, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Circle, Polygon

    fig, (ax, bx) = plt.subplots(1, 2, figsize=(11, 4.5))
    for reg in plan_doc["regions"]:
        ax.add_patch(Polygon(reg["polygon"], closed=True, fc="#7fb77e", alpha=0.25, ec="none"))
    for t in plan_doc["mesh"]["triangles"]:
        pts = [(plan_doc["discs"][k]["x"], plan_doc["discs"][k]["y"]) for k in t + t[:1]]
        ax.plot(*zip(*pts), color="#4a6fa5", lw=0.6)
    for d in plan_doc["discs"]:
        ax.add_patch(Circle((d["x"], d["y"]), d["r"], fc="#d8c3a5", ec="#5a4632"))
    sp = doc["multi"]["scan_points"]
    if sp:
        ax.plot(*zip(*sp), "x", color="#c62828", ms=8)
    xs = [d["x"] for d in plan_doc["discs"]]
    ys = [d["y"] for d in plan_doc["discs"]]
    pad = 0.15 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    ax.set_xlim(min(xs) - pad, max(xs) + pad)
    ax.set_ylim(min(ys) - pad, max(ys) + pad)
    ax.set_aspect("equal")
    ax.set_title(f"preset {doc['preset']}: stems and scan points")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")

    ids = [r["disc"] for r in doc["multi"]["per_disc"]]
    bx.bar(ids, [100 * r["fraction"] for r in doc["multi"]["per_disc"]], color="#4a6fa5", label="multi")
    if doc["single"]:
        best = [max(s["per_disc"][k]["fraction"] for s in doc["single"]) for k in range(len(ids))]
        bx.bar(ids, [100 * b for b in best], color="#f9a825", width=0.4, label="best single")
    bx.axhline(50, color="#888888", lw=0.8, ls="--")
    bx.set_ylim(0, 118)
    bx.set_xlabel("disc")
    bx.set_ylabel("lit boundary (%)")
    bx.legend(loc="upper right", ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_experiment(doc: dict, plan_doc: dict, out_dir, figure: bool = True) -> dict:
    """Write report.json, coverage.csv, plan.json, plan.svg and coverage.png; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out / "report.json",
        "csv": out / "coverage.csv",
        "plan": out / "plan.json",
        "svg": out / "plan.svg",
    }
    paths["report"].write_text(dumps(doc))
    paths["csv"].write_text(coverage_csv(doc))
    paths["plan"].write_text(dumps(plan_doc))
    paths["svg"].write_text(render_svg(plan_doc))
    if figure:
        paths["png"] = out / "coverage.png"
        plot_coverage(doc, plan_doc, paths["png"])
    return paths

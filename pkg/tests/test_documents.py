import json
import math

import pytest

from slabscan.documents import (
    PLAN_SCHEMA,
    DiscFileError,
    InputError,
    document_discs,
    document_scan_points,
    dumps,
    load_discs,
    load_plan,
    load_points,
    plan_document,
    validate,
)
from slabscan.scenario import experiment_presets, generate
from slabscan.slabs import plan_scans
from slabscan.visibility import coverage

RES_DEG = 0.05


def test_csv_two_discs(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("x,y,r\n0,0,1\n4,0,1\n")
    discs = load_discs(p)
    assert len(discs) == 2
    assert discs[1].center == (4, 0)


def test_json_records(tmp_path):
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"discs": [{"x": 0, "y": 0, "r": 1}, {"x": 4, "y": 0, "r": 0.5}]}))
    assert [d.radius for d in load_discs(p)] == [1, 0.5]


def test_zero_radius_rejected(tmp_path):
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"discs": [{"x": 0, "y": 0, "r": 0}]}))
    with pytest.raises(DiscFileError, match="radius must be positive"):
        load_discs(p)


def test_overlap_names_pair(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("x,y,r\n0,0,1\n1.9,0,1\n")
    with pytest.raises(DiscFileError) as info:
        load_discs(p)
    msg = str(info.value)
    assert "0" in msg and "1" in msg and "0.1" in msg


def test_parse_error_has_line(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("x,y,r\n0,0,1\n4,zero,1\n")
    with pytest.raises(DiscFileError) as info:
        load_discs(p)
    assert info.value.line == 3


def test_json_error_has_line_and_column(tmp_path):
    p = tmp_path / "d.json"
    p.write_text('{"discs": [\n  {"x": 0, "y": 0, "r": 1},\n  {"x": 4 "y": 0}\n]}')
    with pytest.raises(DiscFileError) as info:
        load_discs(p)
    assert info.value.line == 3 and info.value.column is not None


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_discs(tmp_path / "nope.csv")


def test_points_csv_and_json(tmp_path):
    a = tmp_path / "p.csv"
    a.write_text("x,y\n1,2\n3,4\n")
    b = tmp_path / "p.json"
    b.write_text('{"points": [[1, 2], [3, 4]]}')
    assert load_points(a) == load_points(b) == [(1, 2), (3, 4)]


def _plan_doc(discs):
    planning = plan_scans(discs)
    rep = coverage(planning.plan.scan_points, discs, math.radians(RES_DEG))
    return plan_document(planning, rep, RES_DEG)


def test_preset_plan_validates_and_partitions():
    discs = generate(experiment_presets()[1])
    doc = _plan_doc(discs)
    validate(doc, PLAN_SCHEMA)
    members = sorted(m for g in doc["plan"]["groups"] for m in g["members"])
    assert members == list(range(len(doc["mesh"]["triangles"])))


def test_round_trip_reproduces_coverage(tmp_path):
    discs = generate(experiment_presets()[4])
    doc = _plan_doc(discs)
    p = tmp_path / "plan.json"
    p.write_text(dumps(doc))
    back = load_plan(p)
    rep = coverage(document_scan_points(back), document_discs(back), math.radians(back["metadata"]["resolution_deg"]))
    for row in doc["coverage"]["per_disc"]:
        assert abs(rep.per_disc[row["disc"]] - row["fraction"]) <= 1e-9
    assert abs(rep.mean - doc["coverage"]["mean"]) <= 1e-9


def test_report_arithmetic_recomputable():
    doc = _plan_doc(generate(experiment_presets()[2]))
    f = [r["fraction"] for r in doc["coverage"]["per_disc"]]
    mean = sum(f) / len(f)
    sd = math.sqrt(sum((x - mean) ** 2 for x in f) / len(f))
    assert doc["coverage"]["mean"] == pytest.approx(mean, abs=1e-12)
    assert doc["coverage"]["sd"] == pytest.approx(sd, abs=1e-12)


def test_load_plan_rejects_other_documents(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"schema": "something/1"}')
    with pytest.raises(InputError):
        load_plan(p)

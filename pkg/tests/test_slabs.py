import math

import numpy as np
import pytest

from oracles import halfplane_vertices, random_triple, shoelace
from slabscan.geom import ConvexPolygon, Disc, OverlapError, Point, intersect_halfplanes, point_in_polygon
from slabscan.laguerre import power_distance
from slabscan.slabs import (
    DegenerateTriangleError,
    FeasibleRegion,
    ShapeInvariantError,
    build_slab,
    classify_shape,
    feasible_region,
    merge_regions,
    objective_arcs,
    plan_scans,
    scan_point_of,
)
from slabscan.visibility import arc_fully_lit

S3 = math.sqrt(3)
EQ = [Disc.at(0, 0, 1), Disc.at(4, 0, 1), Disc.at(2, 2 * S3, 1)]
FOUR_GON = [Disc.at(0, 0, 1), Disc.at(10, 0, 1), Disc.at(5, 1.8, 1)]
FIVE_GON = [Disc.at(1.28, 0.36, 0.05), Disc.at(2.9, 0.96, 0.29), Disc.at(0.54, 2.26, 0.15)]


def _lines(discs, pairs):
    out = []
    for i, j in pairs:
        for h in build_slab(discs[i], discs[j]).halfplanes:
            out.append((h.normal[0], h.normal[1], h.offset))
    return out


# --- build_slab ---

def test_slab_axis_aligned():
    s = build_slab(Disc.at(0, 0, 1), Disc.at(4, 0, 1))
    assert s.p_i == pytest.approx((1, 0)) and s.p_j == pytest.approx((3, 0))
    assert s.width == pytest.approx(2)
    assert s.contains((1, 5)) and s.contains((3, -7)) and s.contains((2, 0))
    assert not s.contains((0.9, 0)) and not s.contains((3.1, 0))


def test_slab_unequal_radii():
    s = build_slab(Disc.at(0, 0, 2), Disc.at(6, 0, 1))
    assert s.p_i == pytest.approx((2, 0)) and s.p_j == pytest.approx((5, 0))
    assert s.width == pytest.approx(3)


def test_slab_sixty_degrees():
    a, b = Disc.at(0, 0, 1), Disc.at(3, 3 * S3, 1)
    s = build_slab(a, b)
    assert s.width == pytest.approx(4)
    u = (0.5, S3 / 2)
    for hp, d, p in ((s.hp_i, a, s.p_i), (s.hp_j, b, s.p_j)):
        # boundary line perpendicular to the 60 degree direction and tangent at p
        assert abs(hp.normal[0] * u[1] - hp.normal[1] * u[0]) < 1e-12
        assert abs(hp.signed_distance(p)) < 1e-12
        assert math.dist(p, d.center) == pytest.approx(d.radius)


def test_slab_overlap_rejected():
    with pytest.raises(OverlapError):
        build_slab(Disc.at(0, 0, 1), Disc.at(2, 0, 1))


@pytest.mark.parametrize("seed", range(10))
def test_slab_open_interior_avoids_discs(seed):
    rng = np.random.default_rng(seed)
    (x1, y1, r1), (x2, y2, r2), _ = random_triple(rng)
    a, b = Disc.at(x1, y1, r1), Disc.at(x2, y2, r2)
    s = build_slab(a, b)
    for d in (a, b):
        for k in range(360):
            p = d.boundary_point(2 * math.pi * k / 360)
            strictly_inside = s.hp_i.signed_distance(p) < -1e-12 and s.hp_j.signed_distance(p) < -1e-12
            assert not strictly_inside


# --- objective arcs ---

def test_objective_arc_equilateral():
    arcs = objective_arcs((0, 1, 2), EQ)
    assert arcs[0].disc_id == 0
    assert arcs[0].start == pytest.approx(0.0, abs=1e-12)
    assert arcs[0].measure == pytest.approx(math.pi / 3)
    assert all(a.measure == pytest.approx(math.pi / 3) for a in arcs)


def test_objective_arc_scalene():
    discs = [Disc.at(0, 0, 1), Disc.at(6, 0, 1), Disc.at(1, 5, 1)]
    arcs = objective_arcs((0, 1, 2), discs)
    pts = [(0, 0), (6, 0), (1, 5)]
    for k, arc in enumerate(arcs):
        c, u, v = np.array(pts[k]), np.array(pts[(k + 1) % 3]), np.array(pts[(k + 2) % 3])
        eu, ev = (u - c) / np.linalg.norm(u - c), (v - c) / np.linalg.norm(v - c)
        interior = math.acos(float(eu @ ev))
        assert arc.measure == pytest.approx(interior)
        assert arc.measure < math.pi
        ends = sorted([math.atan2(eu[1], eu[0]) % (2 * math.pi), math.atan2(ev[1], ev[0]) % (2 * math.pi)])
        got = sorted([arc.start % (2 * math.pi), (arc.start + arc.measure) % (2 * math.pi)])
        assert got == pytest.approx(ends)
    assert sum(a.measure for a in arcs) == pytest.approx(math.pi)


def test_objective_arc_collinear():
    with pytest.raises(DegenerateTriangleError):
        objective_arcs((0, 1, 2), [Disc.at(0, 0, 1), Disc.at(4, 0, 1), Disc.at(8, 0, 1)])


# --- feasible regions ---

def test_equilateral_hexagon():
    reg = feasible_region((0, 1, 2), EQ)
    assert reg.shape == 6
    assert reg.polygon.area == pytest.approx(2 * S3)
    ref = halfplane_vertices(_lines(EQ, [(0, 1), (1, 2), (2, 0)]))
    assert shoelace(ref) == pytest.approx(2 * S3)
    for v in reg.polygon.vertices:
        assert math.dist(v, (2, 2 * S3 / 3)) == pytest.approx(2 / S3)


def test_two_slabs_parallelogram():
    res = intersect_halfplanes([h for i, j in ((0, 1), (0, 2)) for h in build_slab(EQ[i], EQ[j]).halfplanes])
    v = res.vertices
    assert len(v) == 4
    e = [np.subtract(v[(k + 1) % 4], v[k]) for k in range(4)]
    assert abs(e[0][0] * e[2][1] - e[0][1] * e[2][0]) < 1e-9
    assert abs(e[1][0] * e[3][1] - e[1][1] * e[3][0]) < 1e-9


def test_four_gon_witness():
    reg = feasible_region((0, 1, 2), FOUR_GON)
    assert reg.shape == 4
    assert len(halfplane_vertices(_lines(FOUR_GON, [(0, 1), (1, 2), (2, 0)]))) == 4


def test_five_gon_witness():
    reg = feasible_region((0, 1, 2), FIVE_GON)
    assert reg.shape == 5
    assert len(halfplane_vertices(_lines(FIVE_GON, [(0, 1), (1, 2), (2, 0)]))) == 5


def test_five_gon_found_between_four_and_six():
    # sliding one disc turns a quadrilateral into a hexagon; a pentagon lies between
    base = [(0.68, 1.56, 0.23), (4.51, 1.71, 0.11)]

    def shape(y):
        return feasible_region((0, 1, 2), [Disc.at(*d) for d in base] + [Disc.at(4.11, y, 0.17)]).shape

    lo, hi = 2.87, 2.97
    assert shape(lo) == 4 and shape(hi) == 6
    seen = set()
    for _ in range(40):
        mid = (lo + hi) / 2
        s = shape(mid)
        seen.add(s)
        if s == 5:
            break
        if s == 4:
            lo = mid
        else:
            hi = mid
    assert 5 in seen


def test_classify_rejects_triangle():
    with pytest.raises(ShapeInvariantError):
        classify_shape(ConvexPolygon([(0, 0), (1, 0), (0, 1)]))


@pytest.mark.parametrize("seed", range(20))
def test_region_inside_all_slabs(seed):
    rng = np.random.default_rng(seed)
    discs = [Disc.at(*t) for t in random_triple(rng)]
    reg = feasible_region((0, 1, 2), discs)
    for s in reg.slabs:
        assert all(s.contains(v) for v in reg.polygon.vertices)
    assert 4 <= reg.shape <= 6


# --- merge ---

def test_merge_single_triangle():
    reg = feasible_region((0, 1, 2), EQ)
    plan = merge_regions([reg], {0: frozenset()})
    assert len(plan.groups) == 1
    assert plan.groups[0].scan_point == pytest.approx((2, 2 * S3 / 3))


def test_merge_disjoint_regions_split():
    sq = ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    far = ConvexPolygon([(5, 5), (6, 5), (6, 6), (5, 6)])
    regs = [FeasibleRegion(0, (0, 1, 2), sq, 4, ()), FeasibleRegion(1, (1, 2, 3), far, 4, ())]
    plan = merge_regions(regs, {0: frozenset({1}), 1: frozenset({0})})
    assert [g.members for g in plan.groups] == [(0,), (1,)]


def test_merge_kite_matches_clipping_oracle():
    discs = [Disc.at(0, 0, 1), Disc.at(4, 0, 1), Disc.at(2, 3, 1), Disc.at(2, -3, 1)]
    planning = plan_scans(discs, inside_hull=False)
    tris = planning.mesh.triangles
    assert len(tris) == 2
    lines = []
    for t in tris:
        lines += _lines(discs, [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
    ref = halfplane_vertices(lines)
    joint = len(ref) >= 3 and shoelace(ref) > 1e-12
    assert len(planning.plan.groups) == (1 if joint else 2)


# --- scan points ---

def test_scan_point_equilateral():
    reg = feasible_region((0, 1, 2), EQ)
    p = scan_point_of(reg.polygon, EQ)
    assert p == pytest.approx((2, 2 * S3 / 3))
    assert all(math.dist(p, d.center) >= d.radius for d in EQ)


def test_scan_point_fallback_when_centroid_blocked():
    big = [Disc.at(0, 0, 1), Disc.at(20, 0, 1), Disc.at(10, 17, 1)]
    reg = feasible_region((0, 1, 2), big)
    c = reg.polygon.vertices
    centroid = scan_point_of(reg.polygon, big)
    discs = big + [Disc.at(centroid.x, centroid.y, 1)]
    p = scan_point_of(reg.polygon, discs)
    assert p != centroid
    assert p in c
    assert all(power_distance(p, d) > 0 for d in discs)


# --- plans ---

@pytest.mark.parametrize("seed", range(5))
def test_plan_partition_and_member_arcs_lit(seed):
    from slabscan.scenario import random_discs

    discs = random_discs(25, seed=seed)
    planning = plan_scans(discs)
    members = [m for g in planning.plan.groups for m in g.members]
    assert len(members) == len(set(members))
    assert set(members) | set(planning.plan.uncovered_triangles) == set(range(len(planning.mesh.triangles)))
    for g in planning.plan.groups:
        assert point_in_polygon(g.scan_point, g.region)
        for t in g.members:
            for arc in planning.regions[t].objective_arcs:
                assert arc_fully_lit(g.scan_point, arc.disc_id, arc.interval, discs, among=planning.regions[t].triangle)


def test_plan_deterministic():
    from slabscan.scenario import random_discs

    discs = random_discs(60, seed=3)
    a, b = plan_scans(discs), plan_scans(discs)
    assert a.plan == b.plan

"""Slabs, objective arcs, feasible regions and the greedy scan-position merge."""

from __future__ import annotations

import contextlib
import gc
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geom import (
    EPS,
    ConvexPolygon,
    Disc,
    GeometryError,
    HalfPlane,
    Outcome,
    OverlapError,
    Point,
    clip_polygon,
    clip_to,
    disc_hull,
    intersect_halfplanes,
    polygon_centroid,
    tangent_line_at,
)
from .laguerre import TriangulationMesh, laguerre_delaunay, power_distance
from .visibility import TWO_PI, AngularInterval


class DegenerateTriangleError(GeometryError):
    pass


class EmptyRegionError(GeometryError):
    pass


class ShapeInvariantError(GeometryError):
    """A feasible region with fewer than 4 or more than 6 corners."""


class NoValidPointError(GeometryError):
    pass


@dataclass(frozen=True)
class Slab:
    disc_i: int
    disc_j: int
    p_i: Point
    p_j: Point
    hp_i: HalfPlane
    hp_j: HalfPlane

    @property
    def width(self) -> float:
        return self.hp_i.offset + self.hp_j.offset

    @property
    def halfplanes(self):
        return self.hp_i, self.hp_j

    def contains(self, p, tol: float = EPS) -> bool:
        return self.hp_i.contains(p, tol) and self.hp_j.contains(p, tol)


def build_slab(d_i: Disc, d_j: Disc, i: int = 0, j: int = 1) -> Slab:
    """Strip between the tangents at the points where the center segment leaves each disc."""
    ci, cj = d_i.center, d_j.center
    L = math.hypot(cj.x - ci.x, cj.y - ci.y)
    width = L - d_i.radius - d_j.radius
    if width <= EPS:
        raise OverlapError(i, j, EPS - width)
    ux, uy = (cj.x - ci.x) / L, (cj.y - ci.y) / L
    p_i = Point(ci.x + d_i.radius * ux, ci.y + d_i.radius * uy)
    p_j = Point(cj.x - d_j.radius * ux, cj.y - d_j.radius * uy)
    return Slab(i, j, p_i, p_j, tangent_line_at(d_i, p_i), tangent_line_at(d_j, p_j))


@dataclass(frozen=True)
class ObjectiveArc:
    disc_id: int
    interval: AngularInterval

    @property
    def start(self) -> float:
        return self.interval.start

    @property
    def measure(self) -> float:
        return self.interval.measure


def objective_arcs(triangle, discs: Sequence[Disc]) -> tuple:
    """The arc of each vertex disc cut out by its two triangle edges on the inner side."""
    out = []
    for k in range(3):
        i, j, m = triangle[k], triangle[(k + 1) % 3], triangle[(k + 2) % 3]
        c = discs[i].center
        a_j = math.atan2(discs[j].center.y - c.y, discs[j].center.x - c.x)
        a_m = math.atan2(discs[m].center.y - c.y, discs[m].center.x - c.x)
        ccw = (a_m - a_j) % TWO_PI
        if abs(ccw - math.pi) <= 1e-12 or ccw <= 1e-12 or ccw >= TWO_PI - 1e-12:
            raise DegenerateTriangleError(f"triangle {tuple(triangle)} is degenerate at disc {i}")
        if ccw < math.pi:
            iv = AngularInterval(a_j, ccw)
        else:
            iv = AngularInterval(a_m, TWO_PI - ccw)
        out.append(ObjectiveArc(i, iv))
    return tuple(out)


@dataclass(frozen=True)
class FeasibleRegion:
    triangle_id: int
    triangle: tuple
    polygon: ConvexPolygon
    shape: int
    objective_arcs: tuple
    slabs: tuple = field(default=(), compare=False)


def classify_shape(region) -> int:
    poly = getattr(region, "polygon", region)
    verts = list(poly.vertices)
    kept = [v for k, v in enumerate(verts) if math.dist(v, verts[k - 1]) > EPS]
    n = len(kept)
    if not 4 <= n <= 6:
        raise ShapeInvariantError(f"feasible region has {n} corners")
    return n


def triangle_slabs(triangle, discs) -> tuple:
    a, b, c = triangle
    return (
        build_slab(discs[a], discs[b], a, b),
        build_slab(discs[b], discs[c], b, c),
        build_slab(discs[c], discs[a], c, a),
    )


def feasible_region(triangle, discs: Sequence[Disc], triangle_id: int = 0) -> FeasibleRegion:
    """Intersection of the three slabs of a triangle of discs."""
    triangle = tuple(int(k) for k in triangle)
    arcs = objective_arcs(triangle, discs)
    slabs = triangle_slabs(triangle, discs)
    res = intersect_halfplanes([h for s in slabs for h in s.halfplanes])
    if res is Outcome.UNBOUNDED:
        raise DegenerateTriangleError(f"triangle {triangle_id} {triangle}: slabs do not bound a region")
    if res is Outcome.EMPTY:
        raise EmptyRegionError(f"triangle {triangle_id} {triangle}: slabs have no common area")
    shape = classify_shape(res)
    return FeasibleRegion(triangle_id, triangle, res, shape, arcs, slabs)


@dataclass(frozen=True)
class ScanGroup:
    members: tuple
    region: ConvexPolygon
    scan_point: Point


@dataclass(frozen=True)
class ScanPlan:
    groups: tuple
    uncovered_triangles: tuple = ()

    @property
    def scan_points(self) -> list:
        return [g.scan_point for g in self.groups]


class _DiscLookup:
    def __init__(self, discs):
        self.discs = list(discs)
        self.centers = np.array([d.center for d in self.discs], dtype=float).reshape(-1, 2)
        self.radii = np.array([d.radius for d in self.discs], dtype=float)
        self.tree = cKDTree(self.centers) if len(self.discs) else None
        self.rmax = float(self.radii.max()) if len(self.discs) else 0.0

    def clear(self, p) -> bool:
        if self.tree is None:
            return True
        near = self.tree.query_ball_point(p, self.rmax + 1.0)
        return all(power_distance(p, self.discs[k]) > EPS for k in near)

    def clearance(self, p) -> float:
        pw = ((self.centers - np.asarray(p)) ** 2).sum(axis=1) - self.radii ** 2
        return float(pw.min())


def scan_point_of(region_polygon: ConvexPolygon, discs: Sequence[Disc], lookup=None) -> Point:
    """Centroid of the region, or its clearest vertex if the centroid is inside a disc."""
    lookup = lookup or _DiscLookup(discs)
    c = polygon_centroid(region_polygon)
    if lookup.clear(c):
        return c
    best = max(region_polygon.vertices, key=lambda v: (lookup.clearance(v), -v.x, -v.y))
    if lookup.clearance(best) <= EPS:
        raise NoValidPointError("every candidate scan point lies inside a disc")
    return best


def _bbox_meet(a: ConvexPolygon, b: ConvexPolygon) -> bool:
    ax0, ay0, ax1, ay1 = a.bbox()
    bx0, by0, bx1, by1 = b.bbox()
    return not (ax0 > bx1 + EPS or bx0 > ax1 + EPS or ay0 > by1 + EPS or by0 > ay1 + EPS)


def merge_regions(regions: Sequence[FeasibleRegion], adjacency: dict, discs=None,
                  within: ConvexPolygon | None = None) -> ScanPlan:
    """Greedily group neighbouring triangles whose feasible regions share area.

    Each unassigned triangle proposes itself plus the largest subset of its
    unassigned neighbours with a common intersection (lexicographically first
    on ties). The largest proposal wins, lowest seed id first, until every
    triangle belongs to a group.

    With ``within`` every region is first clipped to that polygon; triangles
    whose region misses it are returned as uncovered. With ``discs`` the scan
    point falls back to a clear vertex when the centroid is inside a disc.
    """
    polys, outside = {}, []
    planes = None
    if within is not None:
        planes = np.array(within.lines)
    for r in regions:
        poly = r.polygon if planes is None else clip_to(r.polygon, planes)
        if poly is None:
            outside.append(r.triangle_id)
        else:
            polys[r.triangle_id] = poly
    unassigned = set(polys)
    common = {}

    def intersection(members):
        # members ascending; clip in that order
        if members not in common:
            if len(members) == 1:
                common[members] = polys[members[0]]
            elif len(members) == 2 and not _bbox_meet(polys[members[0]], polys[members[1]]):
                common[members] = None
            else:
                head = intersection(members[:-1])
                common[members] = None if head is None else clip_polygon(head, polys[members[-1]])
        return common[members]

    def overlaps(a, b):
        return intersection((min(a, b), max(a, b))) is not None

    def propose(t):
        nbrs = sorted(n for n in adjacency.get(t, ()) if n in unassigned and overlaps(t, n))
        for size in range(len(nbrs), 0, -1):
            for combo in itertools.combinations(nbrs, size):
                members = tuple(sorted((t,) + combo))
                poly = intersection(members)
                if poly is not None:
                    return members, poly
        return (t,), polys[t]

    proposals = {}
    version = dict.fromkeys(polys, 0)
    heap = []
    for t in sorted(polys):
        proposals[t] = propose(t)
        heapq.heappush(heap, (-len(proposals[t][0]), t, 0))

    lookup = _DiscLookup(discs) if discs is not None else None
    groups = []
    while heap:
        _, t, ver = heapq.heappop(heap)
        if t not in unassigned or ver != version[t]:
            continue
        members, poly = proposals[t]
        unassigned.difference_update(members)
        point = scan_point_of(poly, discs, lookup) if lookup else polygon_centroid(poly)
        groups.append(ScanGroup(members, poly, point))
        touched = {n for m in members for n in adjacency.get(m, ()) if n in unassigned}
        for n in sorted(touched):
            version[n] += 1
            proposals[n] = propose(n)
            heapq.heappush(heap, (-len(proposals[n][0]), n, version[n]))
    return ScanPlan(tuple(groups), tuple(sorted(outside)))


@dataclass(frozen=True)
class Planning:
    """Everything produced while planning scan positions for one disc set."""

    discs: tuple
    mesh: TriangulationMesh
    regions: dict
    plan: ScanPlan
    failures: dict = field(default_factory=dict)


def plan_scans(discs: Sequence[Disc], inside_hull: bool = True) -> Planning:
    """Triangulate, build one feasible region per triangle and merge them.

    Scan points are kept inside the convex hull of the discs unless
    ``inside_hull`` is false. Triangles whose region is empty, unbounded or
    entirely outside the hull end up in ``plan.uncovered_triangles`` with the
    reason in ``failures``.
    """
    with _gc_paused():
        return _plan(tuple(discs), inside_hull)


@contextlib.contextmanager
def _gc_paused():
    # the planner allocates many small acyclic objects; generational scans
    # over them made large inputs scale superlinearly
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def _plan(discs, inside_hull):
    mesh = laguerre_delaunay(discs)
    hull = disc_hull(discs) if inside_hull else None
    regions, failures = {}, {}
    for t, tri in enumerate(mesh.triangles):
        try:
            regions[t] = feasible_region(tri, discs, t)
        except (EmptyRegionError, DegenerateTriangleError) as exc:
            failures[t] = str(exc)
    plan = merge_regions(list(regions.values()), mesh.adjacency, discs, within=hull)
    for t in plan.uncovered_triangles:
        failures[t] = f"triangle {t} {mesh.triangles[t]}: feasible region lies outside the disc hull"
    plan = ScanPlan(plan.groups, tuple(sorted(failures)))
    return Planning(discs, mesh, regions, plan, failures)

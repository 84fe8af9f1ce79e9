"""Laguerre (power) Delaunay triangulation of a disc set.

Discs are lifted to ``(x, y, x^2 + y^2 - r^2)`` and the downward-facing facets
of the 3D convex hull are projected back to the plane. The hull itself comes
from Qhull (``scipy.spatial.ConvexHull``); facet selection, orientation and the
handling of coplanar ties are done here.

Ties (four or more lifted points on one lower-hull plane, e.g. a square of
equal discs) are merged into one planar face and re-triangulated by ear
clipping that always cuts the diagonal with the smallest sorted index pair.
The mesh records that this happened in ``degenerate``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import ConvexHull

from .geom import EPS, EPS_AREA, Disc, GeometryError, Point, check_nonoverlapping, cross


class TriangulationError(GeometryError):
    pass


class LiftedPoint(NamedTuple):
    x: float
    y: float
    z: float


def power_distance(p, disc: Disc) -> float:
    c = disc.center
    dx, dy = p[0] - c.x, p[1] - c.y
    return dx * dx + dy * dy - disc.radius * disc.radius


def lift(disc: Disc) -> LiftedPoint:
    x, y = disc.center
    return LiftedPoint(x, y, x * x + y * y - disc.radius * disc.radius)


@dataclass(frozen=True)
class TriangulationMesh:
    disc_ids: tuple
    triangles: tuple
    adjacency: dict = field(compare=False)
    unrepresented: tuple = ()
    degenerate: bool = False

    def edges(self) -> dict:
        """Map each undirected edge (i, j), i < j, to the triangles using it."""
        out = defaultdict(list)
        for t, tri in enumerate(self.triangles):
            for k in range(3):
                a, b = tri[k], tri[(k + 1) % 3]
                out[(min(a, b), max(a, b))].append(t)
        return dict(out)

    def hull_edges(self) -> list:
        return sorted(e for e, ts in self.edges().items() if len(ts) == 1)


def triangle_adjacency(mesh_or_triangles) -> dict:
    """Triangle id -> frozenset of triangle ids sharing a full edge with it."""
    triangles = getattr(mesh_or_triangles, "triangles", mesh_or_triangles)
    by_edge = defaultdict(list)
    for t, tri in enumerate(triangles):
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            by_edge[(min(a, b), max(a, b))].append(t)
    nbrs = {t: set() for t in range(len(triangles))}
    for ts in by_edge.values():
        for a in ts:
            nbrs[a].update(b for b in ts if b != a)
    return {t: frozenset(s) for t, s in nbrs.items()}


def _normalized_lift(discs):
    xy = np.array([d.center for d in discs], dtype=float)
    r = np.array([d.radius for d in discs], dtype=float)
    shift = xy.mean(axis=0)
    span = float(np.ptp(xy, axis=0).max())
    xy = (xy - shift) / span
    r = r / span
    z = (xy ** 2).sum(axis=1) - r ** 2
    return xy, np.column_stack([xy, z])


def _check_input(discs, xy):
    if len(discs) < 3:
        raise TriangulationError("need >= 3 non-collinear centers")
    check_nonoverlapping(discs)
    # all-collinear test on normalized coordinates
    d = xy - xy[0]
    far = int(np.argmax((d ** 2).sum(axis=1)))
    u = d[far] / np.linalg.norm(d[far])
    off = np.abs(d[:, 0] * u[1] - d[:, 1] * u[0])
    if off.max() <= 1e-12:
        raise TriangulationError("need >= 3 non-collinear centers")


def laguerre_delaunay(discs: Sequence[Disc]) -> TriangulationMesh:
    """Build the Laguerre Delaunay triangulation of ``discs``.

    Raises TriangulationError for fewer than three discs or collinear centers
    and OverlapError for overlapping or touching discs.
    """
    discs = list(discs)
    n = len(discs)
    if n < 3:
        raise TriangulationError("need >= 3 non-collinear centers")
    xy, pts = _normalized_lift(discs)
    _check_input(discs, xy)

    # an apex far above the lift keeps Qhull from seeing flat input (three
    # discs, or all lifted points on one plane); its facets all face upward
    z = pts[:, 2]
    apex = np.array([[xy[:, 0].mean(), xy[:, 1].mean(), z.max() + 10.0 * (np.ptp(z) + 1.0)]])
    hull = ConvexHull(np.vstack([pts, apex]))
    eq = hull.equations
    lower = (eq[:, 2] < -1e-9) & (hull.simplices < n).all(axis=1)
    simplices = hull.simplices[lower]
    planes = eq[lower]

    # orient every facet counter-clockwise in the plane
    tris = []
    for s in simplices:
        a, b, c = (int(v) for v in s)
        o = cross(xy[a], xy[b], xy[c])
        if abs(o) <= 1e-14:
            continue
        tris.append((a, b, c) if o > 0 else (a, c, b))

    tris, degenerate = _resolve_ties(tris, pts, xy)
    tris = sorted(_rotate_min(t) for t in tris)
    tris = [t for t in tris if _area(discs, t) > EPS_AREA]

    used = sorted({v for t in tris for v in t})
    unrep = tuple(sorted(set(range(n)) - set(used)))
    return TriangulationMesh(
        disc_ids=tuple(used),
        triangles=tuple(tris),
        adjacency=triangle_adjacency(tris),
        unrepresented=unrep,
        degenerate=degenerate,
    )


def _area(discs, t):
    a, b, c = (discs[k].center for k in t)
    return cross(a, b, c) / 2.0


def _rotate_min(t):
    k = t.index(min(t))
    return t[k:] + t[:k]


def _coplanar(pts, tri, d, tol=1e-10):
    a, b, c = pts[list(tri)]
    nrm = np.cross(b - a, c - a)
    nn = np.linalg.norm(nrm)
    return abs(float(np.dot(nrm, pts[d] - a))) <= tol * nn


def _resolve_ties(tris, pts, xy):
    """Merge coplanar neighbouring facets and re-triangulate each merged face."""
    parent = list(range(len(tris)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_edge = defaultdict(list)
    for t, tri in enumerate(tris):
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            by_edge[(min(a, b), max(a, b))].append(t)
    merged = False
    for (a, b), ts in by_edge.items():
        if len(ts) != 2:
            continue
        t0, t1 = ts
        d = next(v for v in tris[t1] if v != a and v != b)
        if _coplanar(pts, tris[t0], d):
            ra, rb = find(t0), find(t1)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
                merged = True
    if not merged:
        return tris, False

    groups = defaultdict(list)
    for t in range(len(tris)):
        groups[find(t)].append(t)
    out = []
    for members in groups.values():
        if len(members) == 1:
            out.append(tris[members[0]])
        else:
            out.extend(_triangulate_face([tris[t] for t in members], xy))
    return out, True


def _triangulate_face(face_tris, xy):
    """Re-triangulate a convex planar face given as a set of triangles."""
    counts = defaultdict(int)
    for tri in face_tris:
        for k in range(3):
            counts[(tri[k], tri[(k + 1) % 3])] += 1
    # boundary edges are directed edges whose reverse is absent
    nxt = {a: b for (a, b) in counts if (b, a) not in counts}
    start = min(nxt)
    ring = [start]
    while nxt[ring[-1]] != start:
        ring.append(nxt[ring[-1]])

    out = []
    tol = 1e-14
    while len(ring) > 3:
        best = None
        m = len(ring)
        for k in range(m):
            u, v, w = ring[k - 1], ring[k], ring[(k + 1) % m]
            if cross(xy[u], xy[v], xy[w]) <= tol:
                continue
            key = (min(u, w), max(u, w))
            if best is None or key < best[0]:
                best = (key, k)
        if best is None:
            raise TriangulationError("cannot triangulate degenerate face")
        k = best[1]
        out.append((ring[k - 1], ring[k], ring[(k + 1) % m]))
        del ring[k]
    out.append(tuple(ring))
    return out


def power_center(discs: Sequence[Disc], tri) -> tuple:
    """Point with equal power distance to the three discs of ``tri``, and that power."""
    d0, d1, d2 = (discs[k] for k in tri)
    rows, rhs = [], []
    w0 = lift(d0)
    for d in (d1, d2):
        w = lift(d)
        rows.append([2 * (w.x - w0.x), 2 * (w.y - w0.y)])
        rhs.append(w.z - w0.z)
    p = np.linalg.solve(np.array(rows), np.array(rhs))
    p = Point(*p)
    return p, power_distance(p, d0)


def circumcenter(a, b, c) -> Point:
    ax, ay = a
    bx, by = b[0] - ax, b[1] - ay
    cx, cy = c[0] - ax, c[1] - ay
    d = 2.0 * (bx * cy - by * cx)
    if abs(d) <= EPS_AREA:
        raise TriangulationError("collinear triangle has no circumcenter")
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    return Point(ax + (cy * b2 - by * c2) / d, ay + (bx * c2 - cx * b2) / d)

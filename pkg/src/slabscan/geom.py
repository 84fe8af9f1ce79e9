"""Planar primitives: points, discs, half-planes, convex polygons.

All comparisons use the absolute tolerance ``EPS`` (meters); areas and other
squared quantities use ``EPS_AREA``. Sets are closed: a point on a boundary
belongs to the set.
"""

from __future__ import annotations

import enum
import functools
import math
from collections import namedtuple
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

EPS = 1e-9
EPS_AREA = 1e-12
# half-width of the seed box used by half-plane intersection
BOUND = 1e6


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class NotOnBoundaryError(GeometryError):
    pass


class DegeneratePolygonError(GeometryError):
    pass


class OverlapError(GeometryError):
    """Two discs overlap or touch."""

    def __init__(self, i, j, deficit):
        self.pair = (i, j)
        self.deficit = deficit
        super().__init__(
            f"discs {i} and {j} overlap or touch: separation deficit {deficit:.6g} m"
        )


class Point(namedtuple("Point", "x y")):
    __slots__ = ()

    def __new__(cls, x, y):
        x = float(x)
        y = float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GeometryError(f"non-finite point ({x}, {y})")
        return super().__new__(cls, x, y)

    def __add__(self, other):
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def scale(self, s: float) -> "Point":
        return Point(self.x * s, self.y * s)


def dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def cross(o, a, b) -> float:
    """z-component of (a - o) x (b - o); positive for a left turn."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Disc:
    center: Point
    radius: float

    def __post_init__(self):
        if not isinstance(self.center, Point):
            object.__setattr__(self, "center", Point(*self.center))
        r = float(self.radius)
        if not math.isfinite(r) or r <= 0:
            raise GeometryError("radius must be positive")
        object.__setattr__(self, "radius", r)

    @classmethod
    def at(cls, x: float, y: float, r: float) -> "Disc":
        return cls(Point(x, y), r)

    def boundary_point(self, theta: float) -> Point:
        c = self.center
        return Point(c.x + self.radius * math.cos(theta), c.y + self.radius * math.sin(theta))


def check_nonoverlapping(discs: Sequence[Disc]) -> None:
    """Raise OverlapError for the first (lowest index) pair that is not strictly separated."""
    n = len(discs)
    if n < 2:
        return
    centers = np.array([d.center for d in discs], dtype=float)
    radii = np.array([d.radius for d in discs], dtype=float)
    tree = cKDTree(centers)
    pairs = tree.query_pairs(2.0 * radii.max() + EPS, output_type="ndarray")
    if len(pairs) == 0:
        return
    i, j = pairs[:, 0], pairs[:, 1]
    sep = np.hypot(*(centers[i] - centers[j]).T)
    deficit = radii[i] + radii[j] + EPS - sep
    bad = np.flatnonzero(deficit >= 0)
    if len(bad):
        k = bad[np.lexsort((j[bad], i[bad]))[0]]
        a, b = sorted((int(i[k]), int(j[k])))
        raise OverlapError(a, b, float(deficit[k]))


@dataclass(frozen=True)
class HalfPlane:
    """The closed set ``{p : normal . p <= offset}``."""

    normal: tuple
    offset: float

    def __post_init__(self):
        nx, ny = self.normal
        norm = math.hypot(nx, ny)
        if abs(norm - 1.0) > EPS:
            raise GeometryError(f"half-plane normal must be unit length, got {norm}")
        object.__setattr__(self, "normal", (float(nx), float(ny)))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def through(cls, point, normal) -> "HalfPlane":
        nx, ny = normal
        return cls((nx, ny), nx * point[0] + ny * point[1])

    def signed_distance(self, p) -> float:
        """Positive outside the half-plane."""
        return self.normal[0] * p[0] + self.normal[1] * p[1] - self.offset

    def contains(self, p, tol: float = EPS) -> bool:
        return self.signed_distance(p) <= tol

    def line_points(self, half_length: float):
        """Two points on the boundary line, ``half_length`` either side of its foot."""
        nx, ny = self.normal
        fx, fy = nx * self.offset, ny * self.offset
        return (
            Point(fx - ny * half_length, fy + nx * half_length),
            Point(fx + ny * half_length, fy - nx * half_length),
        )


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        if dist(self.a, self.b) <= EPS:
            raise GeometryError("segment endpoints coincide")


@dataclass(frozen=True)
class ConvexPolygon:
    """Counter-clockwise convex polygon without repeated or collinear vertices."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(v if isinstance(v, Point) else Point(*v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise DegeneratePolygonError(f"polygon needs 3 vertices, got {n}")
        for k in range(n):
            a, b, c = verts[k - 1], verts[k], verts[(k + 1) % n]
            if dist(a, b) <= EPS:
                raise DegeneratePolygonError("duplicate vertex")
            if cross(a, b, c) < -EPS * max(dist(a, b), dist(b, c)):
                raise DegeneratePolygonError("vertices are not convex counter-clockwise")

    def __len__(self):
        return len(self.vertices)

    @property
    def area(self) -> float:
        return _shoelace(self.vertices)[0]

    def edges(self):
        v = self.vertices
        return [(v[k], v[(k + 1) % len(v)]) for k in range(len(v))]

    @functools.cached_property
    def lines(self) -> tuple:
        """Edge lines as (nx, ny, offset) with outward unit normals."""
        out = []
        for a, b in self.edges():
            length = dist(a, b)
            nx, ny = (b[1] - a[1]) / length, (a[0] - b[0]) / length
            out.append((nx, ny, nx * a[0] + ny * a[1]))
        return tuple(out)

    def halfplanes(self) -> list:
        return [HalfPlane((nx, ny), off) for nx, ny, off in self.lines]

    def bbox(self):
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


class Outcome(enum.Enum):
    """Non-polygon results of a half-plane intersection."""

    EMPTY = "empty"
    UNBOUNDED = "unbounded"


def tangent_line_at(disc: Disc, boundary_point) -> HalfPlane:
    """Closed half-plane behind the tangent at ``boundary_point``, on the side away from the disc."""
    c = disc.center
    dx, dy = boundary_point[0] - c.x, boundary_point[1] - c.y
    d = math.hypot(dx, dy)
    if abs(d - disc.radius) > EPS * disc.radius:
        raise NotOnBoundaryError(
            f"point {tuple(boundary_point)} is {abs(d - disc.radius):.3g} m off the disc boundary"
        )
    ux, uy = dx / d, dy / d
    # exterior: (p - c) . u >= r
    return HalfPlane((-ux, -uy), -(ux * c.x + uy * c.y + disc.radius))


def segment_intersects_disc(seg: Segment, disc: Disc) -> bool:
    """True if the segment passes through the open interior; grazing contact does not count."""
    return _segment_hits(seg.a, seg.b, disc.center, disc.radius)


def _segment_hits(a, b, c, r) -> bool:
    dx, dy = b[0] - a[0], b[1] - a[1]
    L2 = dx * dx + dy * dy
    t = ((c[0] - a[0]) * dx + (c[1] - a[1]) * dy) / L2
    t = min(1.0, max(0.0, t))
    px, py = a[0] + t * dx - c[0], a[1] + t * dy - c[1]
    reach = r - EPS
    return reach > 0 and px * px + py * py < reach * reach


# --- half-plane intersection -------------------------------------------------
#
# Polygons are clipped as lists of vertices paired with the label of the line
# carrying the outgoing edge. Labels index into a list of (nx, ny, offset)
# tuples; the four seed-box lines come first. Final vertices are recomputed as
# intersections of their incoming and outgoing lines, which keeps them on the
# input lines to machine precision.

_BOX_LINES = [(1.0, 0.0, BOUND), (0.0, 1.0, BOUND), (-1.0, 0.0, BOUND), (0.0, -1.0, BOUND)]
_BOX = [((BOUND, -BOUND), 1), ((BOUND, BOUND), 2), ((-BOUND, BOUND), 3), ((-BOUND, -BOUND), 0)]


def _clip(poly, line, label):
    nx, ny, off = line
    out = []
    m = len(poly)
    for k in range(m):
        s, lab = poly[k]
        e = poly[(k + 1) % m][0]
        ds = nx * s[0] + ny * s[1] - off
        de = nx * e[0] + ny * e[1] - off
        s_in = ds <= EPS
        e_in = de <= EPS
        if s_in:
            out.append((s, lab))
        if s_in != e_in:
            t = ds / (ds - de)
            x = (s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1]))
            out.append((x, label if s_in else lab))
    return out


def _meet(l1, l2):
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    det = a1 * b2 - a2 * b1
    if abs(det) < 1e-12:
        return None
    return ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)


def _shoelace(verts):
    x0, y0 = verts[0]
    a2 = cx = cy = 0.0
    for k in range(1, len(verts) - 1):
        x1, y1 = verts[k][0] - x0, verts[k][1] - y0
        x2, y2 = verts[k + 1][0] - x0, verts[k + 1][1] - y0
        w = x1 * y2 - x2 * y1
        a2 += w
        cx += w * (x1 + x2)
        cy += w * (y1 + y2)
    area = a2 / 2.0
    if a2 == 0:
        return 0.0, (x0, y0)
    return area, (x0 + cx / (3.0 * a2), y0 + cy / (3.0 * a2))


def _finish(poly, lines):
    """Snap, deduplicate and simplify a clipped vertex ring; returns a vertex list."""
    m = len(poly)
    verts = []
    for k in range(m):
        p, out_lab = poly[k]
        in_lab = poly[k - 1][1]
        if in_lab != out_lab:
            q = _meet(lines[in_lab], lines[out_lab])
            if q is not None and math.hypot(q[0] - p[0], q[1] - p[1]) < 1e-6 * (1.0 + abs(p[0]) + abs(p[1])):
                p = q
        verts.append(p)
    # drop near-duplicates
    ring = []
    for p in verts:
        if not ring or math.hypot(p[0] - ring[-1][0], p[1] - ring[-1][1]) > EPS:
            ring.append(p)
    while len(ring) > 1 and math.hypot(ring[0][0] - ring[-1][0], ring[0][1] - ring[-1][1]) <= EPS:
        ring.pop()
    # drop collinear vertices
    changed = True
    while changed and len(ring) >= 3:
        changed = False
        for k in range(len(ring)):
            a, b, c = ring[k - 1], ring[k], ring[(k + 1) % len(ring)]
            if abs(cross(a, b, c)) <= EPS * max(dist(a, c), EPS):
                del ring[k]
                changed = True
                break
    return ring


def _clip_all(poly, lines, labels):
    for lab in labels:
        poly = _clip(poly, lines[lab], lab)
        if len(poly) < 3:
            return []
    return poly


def intersect_halfplanes(planes: Iterable[HalfPlane]):
    """Intersect closed half-planes.

    Returns a ConvexPolygon, ``Outcome.EMPTY`` (including zero-area results),
    or ``Outcome.UNBOUNDED`` when the result reaches the +/-1e6 m seed box.
    """
    planes = list(planes)
    if not planes:
        raise ValueError("need at least one half-plane")
    lines = list(_BOX_LINES) + [(h.normal[0], h.normal[1], h.offset) for h in planes]
    poly = _clip_all(list(_BOX), lines, range(4, len(lines)))
    if not poly:
        return Outcome.EMPTY
    ring = _finish(poly, lines)
    if len(ring) < 3 or _shoelace(ring)[0] <= EPS_AREA:
        return Outcome.EMPTY
    if any(max(abs(x), abs(y)) >= BOUND - 1e-3 for x, y in ring):
        return Outcome.UNBOUNDED
    return ConvexPolygon(tuple(Point(x, y) for x, y in ring))


def clip_polygon(poly: ConvexPolygon, other: ConvexPolygon):
    """Intersection of two convex polygons, or None when it has no area."""
    lines = list(poly.lines) + list(other.lines)
    n = len(poly)
    ring = [(tuple(v), k) for k, v in enumerate(poly.vertices)]
    ring = _clip_all(ring, lines, range(n, len(lines)))
    if not ring:
        return None
    ring = _finish(ring, lines)
    if len(ring) < 3 or _shoelace(ring)[0] <= EPS_AREA:
        return None
    return ConvexPolygon(tuple(Point(x, y) for x, y in ring))


def clip_to(poly: ConvexPolygon, planes: np.ndarray):
    """Clip by the rows (nx, ny, offset) of ``planes`` that some vertex violates."""
    v = np.asarray(poly.vertices)
    viol = (v @ planes[:, :2].T - planes[:, 2] > EPS).any(axis=0)
    if not viol.any():
        return poly
    lines = list(poly.lines)
    n = len(lines)
    lines += [tuple(row) for row in planes[viol]]
    ring = [(tuple(p), k) for k, p in enumerate(poly.vertices)]
    ring = _clip_all(ring, lines, range(n, len(lines)))
    if not ring:
        return None
    ring = _finish(ring, lines)
    if len(ring) < 3 or _shoelace(ring)[0] <= EPS_AREA:
        return None
    return ConvexPolygon(tuple(Point(x, y) for x, y in ring))


def disc_hull(discs: Sequence[Disc], samples: int = 128) -> ConvexPolygon:
    """Inscribed polygon of the convex hull of a disc set (the curvilinear hull).

    Each disc contributes ``samples`` boundary points, so the polygon lies
    inside the true hull by at most r * (1 - cos(pi / samples)).
    """
    c = np.array([d.center for d in discs], dtype=float)
    r = np.array([d.radius for d in discs], dtype=float)
    t = 2 * np.pi * np.arange(samples) / samples
    ring = np.stack([np.cos(t), np.sin(t)], axis=1)
    pts = (c[:, None, :] + r[:, None, None] * ring[None, :, :]).reshape(-1, 2)
    hull = ConvexHull(pts)
    verts = pts[hull.vertices]  # counter-clockwise for 2D input
    return ConvexPolygon(tuple(Point(x, y) for x, y in _finish([(tuple(p), 0) for p in verts], [(1.0, 0.0, 0.0)])))


def polygons_overlap(a: ConvexPolygon, b: ConvexPolygon) -> bool:
    ax0, ay0, ax1, ay1 = a.bbox()
    bx0, by0, bx1, by1 = b.bbox()
    if ax0 > bx1 + EPS or bx0 > ax1 + EPS or ay0 > by1 + EPS or by0 > ay1 + EPS:
        return False
    return clip_polygon(a, b) is not None


def polygon_centroid(poly: ConvexPolygon) -> Point:
    area, (cx, cy) = _shoelace(poly.vertices)
    if area <= EPS_AREA:
        raise DegeneratePolygonError(f"polygon area {area:.3g} too small for a centroid")
    return Point(cx, cy)


def point_in_polygon(p, poly: ConvexPolygon, tol: float = EPS) -> bool:
    for a, b in poly.edges():
        if cross(a, b, p) < -tol * dist(a, b):
            return False
    return True

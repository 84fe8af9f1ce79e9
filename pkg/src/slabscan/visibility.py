"""Boundary illumination of discs by point sources under mutual occlusion.

Visibility is sampled: boundary angles are probed at a fixed angular
resolution inside the arc a source can see past the disc itself, and each
probe is tested against every occluder. Runs of visible probes become arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geom import EPS, Disc, GeometryError, _segment_hits

TWO_PI = 2.0 * math.pi
DEFAULT_RESOLUTION = math.radians(0.05)


class PointInsideDiscError(GeometryError):
    def __init__(self, point, disc_id=None):
        self.point = point
        self.disc_id = disc_id
        which = "a disc" if disc_id is None else f"disc {disc_id}"
        super().__init__(f"point ({point[0]:.6f}, {point[1]:.6f}) lies inside or on {which}")


def _wrap(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    return 0.0 if t >= TWO_PI else t


@dataclass(frozen=True)
class AngularInterval:
    """Counter-clockwise arc ``[start, start + measure]``; may run past 2*pi."""

    start: float
    measure: float

    def __post_init__(self):
        if not (0.0 < self.measure <= TWO_PI + 1e-12):
            raise GeometryError(f"arc measure must be in (0, 2pi], got {self.measure}")
        object.__setattr__(self, "start", _wrap(self.start))
        object.__setattr__(self, "measure", min(float(self.measure), TWO_PI))

    @property
    def end(self) -> float:
        return self.start + self.measure

    def contains(self, theta: float, tol: float = 1e-12) -> bool:
        off = _wrap(theta - self.start)
        return off <= self.measure + tol or off >= TWO_PI - tol

    def samples(self, resolution: float) -> np.ndarray:
        """Evenly spaced angles covering the arc, both ends included, step <= resolution."""
        n = max(1, math.ceil(self.measure / resolution - 1e-9))
        return self.start + self.measure * np.arange(n + 1) / n


def _pieces(intervals):
    """Split into non-wrapping [a, b] pieces within [0, 2pi]."""
    for iv in intervals:
        a, b = iv.start, iv.start + iv.measure
        if b > TWO_PI:
            yield a, TWO_PI
            yield 0.0, b - TWO_PI
        else:
            yield a, b


@dataclass(frozen=True)
class ArcSet:
    disc_id: int
    intervals: tuple = ()

    @classmethod
    def from_intervals(cls, disc_id, intervals) -> "ArcSet":
        pieces = sorted(_pieces(intervals))
        merged = []
        for a, b in pieces:
            if merged and a <= merged[-1][1] + 1e-12:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        if not merged:
            return cls(disc_id, ())
        if merged[0][1] - merged[0][0] >= TWO_PI - 1e-12:
            return cls(disc_id, (AngularInterval(0.0, TWO_PI),))
        # rejoin across the zero angle
        if len(merged) > 1 and merged[0][0] <= 1e-12 and merged[-1][1] >= TWO_PI - 1e-12:
            first = merged.pop(0)
            merged[-1][1] = TWO_PI + first[1]
        out = tuple(AngularInterval(a, b - a) for a, b in merged if b - a > 0)
        return cls(disc_id, out)

    @property
    def measure(self) -> float:
        return min(TWO_PI, sum(iv.measure for iv in self.intervals))

    @property
    def fraction(self) -> float:
        return self.measure / TWO_PI

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet.from_intervals(self.disc_id, self.intervals + other.intervals)


@dataclass(frozen=True)
class CoverageReport:
    per_disc: dict
    mean: float
    sd: float
    detected: int
    threshold: float = 0.0

    @classmethod
    def from_fractions(cls, per_disc: dict, threshold: float = 0.0) -> "CoverageReport":
        vals = np.array([per_disc[k] for k in sorted(per_disc)], dtype=float)
        mean = float(vals.mean()) if len(vals) else 0.0
        sd = float(vals.std()) if len(vals) else 0.0
        detected = int((vals > threshold).sum())
        return cls(dict(sorted(per_disc.items())), mean, sd, detected, threshold)

    def _detected(self) -> np.ndarray:
        return np.array([f for _, f in sorted(self.per_disc.items()) if f > self.threshold], dtype=float)

    @property
    def detected_mean(self) -> float:
        """Mean over detected discs only; hidden stems do not pull it toward zero."""
        v = self._detected()
        return float(v.mean()) if len(v) else 0.0

    @property
    def detected_sd(self) -> float:
        v = self._detected()
        return float(v.std()) if len(v) else 0.0


def unobstructed_interval(q, disc: Disc) -> AngularInterval:
    """Arc of ``disc`` facing ``q`` between the two tangent points seen from ``q``."""
    c = disc.center
    dx, dy = q[0] - c.x, q[1] - c.y
    d = math.hypot(dx, dy)
    if d * d - disc.radius * disc.radius <= EPS:
        raise PointInsideDiscError(q)
    half = math.acos(disc.radius / d)
    return AngularInterval(math.atan2(dy, dx) - half, 2.0 * half)


def _faces(q, disc: Disc, theta: float) -> bool:
    # q on the closed outer side of the tangent at theta
    ux, uy = math.cos(theta), math.sin(theta)
    c = disc.center
    px, py = c.x + disc.radius * ux, c.y + disc.radius * uy
    return (q[0] - px) * ux + (q[1] - py) * uy >= -EPS


def is_visible(q, theta: float, target: Disc, occluders: Sequence[Disc]) -> bool:
    """True if the boundary point of ``target`` at angle ``theta`` is lit from ``q``."""
    if not _faces(q, target, theta):
        return False
    p = target.boundary_point(theta)
    if _segment_hits(q, p, target.center, target.radius):
        return False
    return not any(_segment_hits(q, p, d.center, d.radius) for d in occluders)


def _blocked(q, pts, centers, radii):
    """Boolean mask over ``pts``: segment q->pt passes through some open disc."""
    if len(centers) == 0:
        return np.zeros(len(pts), dtype=bool)
    d = pts - q  # (n, 2)
    L2 = (d ** 2).sum(axis=1)  # (n,)
    w = centers - q  # (m, 2)
    t = np.clip((d @ w.T) / L2[:, None], 0.0, 1.0)  # (n, m)
    px = q[0] + t * d[:, 0:1] - centers[:, 0]
    py = q[1] + t * d[:, 1:2] - centers[:, 1]
    reach = radii - EPS
    return ((px * px + py * py) < reach * reach).any(axis=1)


class Scene:
    """Disc arrays prepared for repeated visibility queries."""

    def __init__(self, discs: Sequence[Disc]):
        self.discs = list(discs)
        self.centers = np.array([d.center for d in self.discs], dtype=float).reshape(-1, 2)
        self.radii = np.array([d.radius for d in self.discs], dtype=float)

    def check_outside(self, q):
        if not len(self.discs):
            return
        pw = ((self.centers - q) ** 2).sum(axis=1) - self.radii ** 2
        k = int(np.argmin(pw))
        if pw[k] <= EPS:
            raise PointInsideDiscError(q, k)

    def candidates(self, q, target_id: int, among=None) -> np.ndarray:
        """Indices of discs that could shadow any part of ``target_id`` from ``q``."""
        idx = np.arange(len(self.discs)) if among is None else np.asarray(sorted(among), dtype=int)
        idx = idx[idx != target_id]
        if not len(idx):
            return idx
        c = self.centers[target_id]
        r = self.radii[target_id]
        q = np.asarray(q, dtype=float)
        seg = c - q
        L2 = float(seg @ seg)
        w = self.centers[idx] - q
        t = np.clip((w @ seg) / L2, 0.0, 1.0)
        gap = np.hypot(*(w - t[:, None] * seg).T)
        return idx[gap < self.radii[idx] + r]

    def visible_mask(self, q, target_id: int, thetas, among=None) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        d = self.discs[target_id]
        pts = np.column_stack([d.center.x + d.radius * np.cos(thetas), d.center.y + d.radius * np.sin(thetas)])
        occ = self.candidates(q, target_id, among)
        idx = np.append(occ, target_id)
        return ~_blocked(q, pts, self.centers[idx], self.radii[idx])

    def arcset(self, q, target_id: int, resolution: float = DEFAULT_RESOLUTION, among=None) -> ArcSet:
        iv = unobstructed_interval(q, self.discs[target_id])
        thetas = iv.samples(resolution)
        vis = self.visible_mask(q, target_id, thetas, among)
        return ArcSet.from_intervals(target_id, _runs(thetas, vis))


def _runs(thetas, vis):
    out = []
    n = len(vis)
    k = 0
    while k < n:
        if not vis[k]:
            k += 1
            continue
        j = k
        while j + 1 < n and vis[j + 1]:
            j += 1
        if thetas[j] > thetas[k]:
            out.append(AngularInterval(thetas[k], thetas[j] - thetas[k]))
        k = j + 1
    return out


def illuminated_arcset(q, target_id: int, discs: Sequence[Disc], resolution: float = DEFAULT_RESOLUTION) -> ArcSet:
    """Sampled lit arcs of ``discs[target_id]`` seen from ``q`` with all other discs occluding.

    A run containing a single probe has no length and is dropped.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    scene = Scene(discs)
    scene.check_outside(q)
    return scene.arcset(q, target_id, resolution)


def arcsets(scan_points, discs: Sequence[Disc], resolution: float = DEFAULT_RESOLUTION) -> list:
    """Union over all scan points of the lit arcs of every disc."""
    scene = Scene(discs)
    for q in scan_points:
        scene.check_outside(q)
    out = []
    for k in range(len(scene.discs)):
        acc = ArcSet(k)
        for q in scan_points:
            acc = acc.union(scene.arcset(q, k, resolution))
        out.append(acc)
    return out


def coverage(scan_points, discs: Sequence[Disc], resolution: float = DEFAULT_RESOLUTION,
             threshold: float = 0.0) -> CoverageReport:
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    sets = arcsets(list(scan_points), discs, resolution)
    return CoverageReport.from_fractions({s.disc_id: s.fraction for s in sets}, threshold)


def arc_fully_lit(q, disc_id: int, arc: AngularInterval, discs: Sequence[Disc],
                  resolution: float = DEFAULT_RESOLUTION, among=None) -> bool:
    """Probe ``arc`` end to end at ``resolution`` and require every probe to be lit.

    ``among`` restricts the occluders to a subset of disc ids.
    """
    scene = discs if isinstance(discs, Scene) else Scene(discs)
    d = scene.discs[disc_id]
    thetas = arc.samples(resolution)
    ux, uy = np.cos(thetas), np.sin(thetas)
    facing = (q[0] - d.center.x) * ux + (q[1] - d.center.y) * uy - d.radius >= -EPS
    if not facing.all():
        return False
    return bool(scene.visible_mask(q, disc_id, thetas, among).all())

"""Synthetic stem layouts: grids of discs, optionally jittered, with one or two diameters."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .geom import EPS, Disc, GeometryError

PVC_DIAMETER = 0.1524  # m, 6 in pipe
TUBE_DIAMETER = 0.0762  # m, 3 in tube
DEFAULT_SPACING = 2.0  # m; not given for the physical plots
MAX_ATTEMPTS = 1000

RNG_NAME = f"numpy.random.PCG64 (numpy {np.__version__})"

ON_GRID = "on_grid"
JITTERED = "jittered"
ASSIGNMENTS = ("all_same", "alternating", "random_split")


class PlacementError(GeometryError):
    pass


@dataclass(frozen=True)
class ForestSpec:
    rows: int
    cols: int
    spacing: float = DEFAULT_SPACING
    layout: str = ON_GRID
    diameters: tuple = (PVC_DIAMETER,)
    assignment: str = "all_same"
    seed: int = 0
    jitter_radius: float | None = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if self.layout not in (ON_GRID, JITTERED):
            raise ValueError(f"unknown layout {self.layout!r}")
        if self.assignment not in ASSIGNMENTS:
            raise ValueError(f"unknown assignment {self.assignment!r}")
        if not self.diameters or min(self.diameters) <= 0:
            raise ValueError("diameters must be positive")
        if self.spacing <= max(self.diameters):
            raise ValueError("spacing must exceed the largest diameter")
        if self.jitter_radius is None:
            object.__setattr__(self, "jitter_radius", self.spacing / 2 if self.layout == JITTERED else 0.0)
        if self.jitter_radius > self.spacing / 2 + EPS:
            raise ValueError("jitter radius cannot exceed half the spacing")
        object.__setattr__(self, "diameters", tuple(float(d) for d in self.diameters))

    @property
    def count(self) -> int:
        return self.rows * self.cols

    def to_dict(self) -> dict:
        d = asdict(self)
        d["diameters"] = list(self.diameters)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ForestSpec":
        d = dict(d)
        d["diameters"] = tuple(d["diameters"])
        return cls(**d)


def _diameters(spec: ForestSpec, rng) -> list:
    n = spec.count
    ds = spec.diameters
    if spec.assignment == "all_same":
        return [ds[0]] * n
    if spec.assignment == "alternating":
        return [ds[k % len(ds)] for k in range(n)]
    # random_split: equal shares of each diameter, shuffled
    out = [ds[k % len(ds)] for k in range(n)]
    rng.shuffle(out)
    return out


def generate(spec: ForestSpec) -> list:
    """Discs in row-major order; center of cell (i, j) is (i * spacing, j * spacing) before jitter."""
    rng = np.random.default_rng(spec.seed)
    diam = _diameters(spec, rng)
    placed = []
    k = 0
    for j in range(spec.rows):
        for i in range(spec.cols):
            gx, gy = i * spec.spacing, j * spec.spacing
            r = diam[k] / 2
            k += 1
            if spec.layout == ON_GRID:
                placed.append(Disc.at(gx, gy, r))
                continue
            for _ in range(MAX_ATTEMPTS):
                rho = spec.jitter_radius * math.sqrt(rng.random())
                phi = 2 * math.pi * rng.random()
                x, y = gx + rho * math.cos(phi), gy + rho * math.sin(phi)
                if all(math.hypot(x - d.center.x, y - d.center.y) > r + d.radius + EPS for d in placed):
                    placed.append(Disc.at(x, y, r))
                    break
            else:
                raise PlacementError(f"could not place disc {k - 1} without overlap in {MAX_ATTEMPTS} draws")
    return placed


def experiment_presets(spacing: float = DEFAULT_SPACING) -> dict:
    """The five stem layouts: 12 stems on a 3 x 4 grid each.

    Presets 4 and 5 share a description and differ only by seed.
    """
    mixed = (PVC_DIAMETER, TUBE_DIAMETER)
    base = ForestSpec(3, 4, spacing=spacing)
    return {
        1: base,
        2: replace(base, layout=JITTERED, seed=2, jitter_radius=None),
        3: replace(base, diameters=mixed, assignment="alternating"),
        4: replace(base, layout=JITTERED, diameters=mixed, assignment="alternating", seed=4, jitter_radius=None),
        5: replace(base, layout=JITTERED, diameters=mixed, assignment="alternating", seed=5, jitter_radius=None),
    }


# presets that also get one report per scan position
SINGLE_SCAN_PRESETS = (1, 2)


def random_discs(n: int, seed: int = 0, box: float | None = None,
                 rmin: float = 0.05, rmax: float = 0.3, max_tries: int = 200) -> list:
    """``n`` pairwise separated discs with uniform centers in a square and uniform radii.

    The default box keeps the disc area fraction near 4 %, so rejection stays cheap.
    """
    rng = np.random.default_rng(seed)
    if box is None:
        box = math.sqrt(n * math.pi * ((rmin + rmax) / 2) ** 2 / 0.04)
    cell = 2 * rmax + EPS
    grid: dict = {}
    out = []
    for k in range(n):
        for _ in range(max_tries):
            x, y = rng.uniform(0, box, 2)
            r = rng.uniform(rmin, rmax)
            gx, gy = int(x // cell), int(y // cell)
            ok = True
            for ix in (gx - 1, gx, gx + 1):
                for iy in (gy - 1, gy, gy + 1):
                    for d in grid.get((ix, iy), ()):
                        if math.hypot(x - d.center.x, y - d.center.y) <= r + d.radius + EPS:
                            ok = False
                            break
            if ok:
                d = Disc.at(x, y, r)
                grid.setdefault((gx, gy), []).append(d)
                out.append(d)
                break
        else:
            raise PlacementError(f"could not place disc {k} in a {box:.2f} m box")
    return out

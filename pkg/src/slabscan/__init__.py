"""Scan-position planning for stands of circular stems.

Discs are triangulated by their Laguerre Delaunay triangulation; each
triangle gets the intersection of three tangent slabs as its feasible region,
neighbouring regions are merged greedily, and boundary coverage is evaluated
under mutual occlusion.
"""

__version__ = "0.1.0"

from .geom import Disc, Point  # noqa: E402
from .slabs import plan_scans  # noqa: E402
from .visibility import coverage  # noqa: E402

__all__ = ["Disc", "Point", "plan_scans", "coverage", "__version__"]

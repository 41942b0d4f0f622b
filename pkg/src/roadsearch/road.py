"""Road construction and pre-execution validity checking.

A :class:`ControlPointSet` (genotype) becomes a :class:`RoadSpec`
(phenotype): an arc-length-resampled centerline with left/right lane
boundaries at +-lane_width. The road is two lanes wide; the vehicle keeps
the right lane. ``validate`` decides whether the road is drivable at all
before any simulation is spent on it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ControlPointSet,
    min_curvature_radius,
    polyline_lengths,
    sample_bezier,
    segment_self_distances,
)

__all__ = [
    "RoadParams",
    "RoadSpec",
    "ValidityReport",
    "build_road",
    "validate",
    "road_to_dict",
    "road_from_dict",
    "OUT_OF_MAP",
    "OVERLAP",
    "TOO_SHARP",
    "TOO_SHORT",
]

OUT_OF_MAP = "OUT_OF_MAP"
OVERLAP = "OVERLAP"
TOO_SHARP = "TOO_SHARP"
TOO_SHORT = "TOO_SHORT"


@dataclass
class RoadParams:
    """Geometry parameters shared by road building and validation.

    ``overlap_buffer`` defaults to one full road width (2 x lane_width) so
    nearly-touching folds are rejected, not just exact crossings.
    ``min_radius`` is the sharpest curve the vehicle is assumed to manage.
    """

    lane_width: float = 4.0
    num_samples: int = 100
    min_radius: float = 7.0
    map_size: float = 200.0
    overlap_buffer: float | None = None

    def __post_init__(self):
        if self.lane_width <= 0:
            raise ValueError("lane_width must be positive")
        if self.num_samples < 2:
            raise ValueError("num_samples must be >= 2")
        if self.min_radius <= 0:
            raise ValueError("min_radius must be positive")
        if self.map_size <= 0:
            raise ValueError("map_size must be positive")
        if self.overlap_buffer is None:
            self.overlap_buffer = 2.0 * self.lane_width
        if self.overlap_buffer < 0:
            raise ValueError("overlap_buffer must be >= 0")


@dataclass
class RoadSpec:
    """Executable road: centerline plus lane boundaries, equal point counts."""

    centerline: np.ndarray
    left_boundary: np.ndarray
    right_boundary: np.ndarray
    params: RoadParams

    def length(self) -> float:
        return float(polyline_lengths(self.centerline)[-1])


@dataclass
class ValidityReport:
    valid: bool
    violations: list = field(default_factory=list)

    def kinds(self):
        return [v["kind"] for v in self.violations]


def _resample_uniform(p: np.ndarray, num_samples: int) -> np.ndarray:
    cum = polyline_lengths(p)
    total = cum[-1]
    if total == 0.0:
        return p[:2].copy()
    s = np.linspace(0.0, total, num_samples)
    x = np.interp(s, cum, p[:, 0])
    y = np.interp(s, cum, p[:, 1])
    return np.column_stack([x, y])


def _unit_left_normals(p: np.ndarray) -> np.ndarray:
    # tangent at a vertex = mean of the adjacent segment directions
    seg = np.diff(p, axis=0)
    norms = np.linalg.norm(seg, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    d = seg / norms
    tang = np.empty_like(p)
    tang[0] = d[0]
    tang[-1] = d[-1]
    tang[1:-1] = d[:-1] + d[1:]
    tn = np.linalg.norm(tang, axis=1, keepdims=True)
    degenerate = tn[:, 0] == 0.0
    if degenerate.any():  # 180-degree reversal; fall back to incoming direction
        tang[1:-1][degenerate[1:-1]] = d[:-1][degenerate[1:-1]]
        tn = np.linalg.norm(tang, axis=1, keepdims=True)
        tn[tn == 0.0] = 1.0
    tang /= tn
    return np.column_stack([-tang[:, 1], tang[:, 0]])


def build_road(cps: ControlPointSet, params: RoadParams) -> RoadSpec:
    """Build the road for a control-point set.

    The centerline is the Bezier curve sampled uniformly in parameter and
    then resampled to approximately uniform arc-length spacing; boundaries
    sit at +-lane_width along the per-point normals. Degenerate curves
    still produce a RoadSpec; ``validate`` reports them as TOO_SHORT.
    """
    raw = sample_bezier(cps, params.num_samples)
    if len(raw) < 2:  # all control points coincide
        raw = np.vstack([cps.points[0], cps.points[-1] + [1e-9, 0.0]])
    center = _resample_uniform(raw, params.num_samples)
    normals = _unit_left_normals(center)
    left = center + params.lane_width * normals
    right = center - params.lane_width * normals
    return RoadSpec(center, left, right, params)


# arc separation (in lane widths) under which centerline proximity is the
# road simply continuing, not a fold; local sharpness is TOO_SHARP's job
FOLD_EXEMPT_LANE_WIDTHS = 4.0


def _folds_back(center: np.ndarray, buffer: float, exempt_arc: float) -> bool:
    """Does the centerline come within ``buffer`` of itself between points
    more than ``exempt_arc`` apart along the curve?

    Unlike raw segment adjacency, the exemption is by arc separation:
    with densely sampled centerlines every segment is trivially near its
    neighbours, and only far-apart proximity means overlapping asphalt.
    Crossings (distance exactly 0) always count.
    """
    if len(center) < 3:
        return False
    dist = segment_self_distances(center)
    cum = polyline_lengths(center)
    m = len(center) - 1
    # arc gap between the end of segment i and the start of segment j > i
    gap = cum[:-1][None, :] - cum[1:][:, None]
    idx = np.arange(m)
    nonadjacent = idx[None, :] - idx[:, None] >= 2  # upper triangle, j >= i+2
    hits = nonadjacent & (((gap > exempt_arc) & (dist < buffer)) | (dist == 0.0))
    return bool(hits.any())


def validate(road: RoadSpec) -> ValidityReport:
    """Pre-execution validity check; invalid roads are never simulated."""
    p = road.params
    violations = []
    center = road.centerline
    if _folds_back(center, p.overlap_buffer,
                   FOLD_EXEMPT_LANE_WIDTHS * p.lane_width):
        violations.append({
            "kind": OVERLAP,
            "detail": f"centerline folds back on itself within {p.overlap_buffer:g} m",
        })
    if len(center) >= 3:
        radius = min_curvature_radius(center)
        if radius < p.min_radius:
            violations.append({
                "kind": TOO_SHARP,
                "detail": f"min circumradius {radius:.2f} m < {p.min_radius:g} m",
            })
    for name, boundary in (("left", road.left_boundary), ("right", road.right_boundary)):
        if boundary.min() < 0.0 or boundary.max() > p.map_size:
            violations.append({
                "kind": OUT_OF_MAP,
                "detail": f"{name} boundary leaves the {p.map_size:g} m map",
            })
    length = road.length()
    if length < 4.0 * p.lane_width:
        violations.append({
            "kind": TOO_SHORT,
            "detail": f"arc length {length:.2f} m < {4.0 * p.lane_width:g} m",
        })
    return ValidityReport(valid=not violations, violations=violations)


def road_to_dict(road: RoadSpec) -> dict:
    """JSON-ready form; also the payload of the external-SUT protocol."""
    return {
        "centerline": road.centerline.tolist(),
        "left_boundary": road.left_boundary.tolist(),
        "right_boundary": road.right_boundary.tolist(),
        "params": {
            "lane_width": road.params.lane_width,
            "num_samples": road.params.num_samples,
            "min_radius": road.params.min_radius,
            "map_size": road.params.map_size,
            "overlap_buffer": road.params.overlap_buffer,
        },
    }


def road_from_dict(data: dict) -> RoadSpec:
    params = RoadParams(**data["params"])
    return RoadSpec(
        np.asarray(data["centerline"], dtype=float),
        np.asarray(data["left_boundary"], dtype=float),
        np.asarray(data["right_boundary"], dtype=float),
        params,
    )

"""Polygon arithmetic on continuous image coordinates.

The coordinate frame is shared by every module: pixel (row i, col j)
occupies the unit square [j, j+1) x [i, i+1) and has its center at
(j + 0.5, i + 0.5). Polygons are canonicalized counter-clockwise,
meaning positive shoelace sum in (x, y) order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import Polygon as _ShapelyPolygon

# Chord deviation allowed when round offset joins are flattened to polylines.
ARC_TOLERANCE = 0.25


class ValidationError(ValueError):
    """An input value failed construction-time validation."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class AxisAlignedBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        vals = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"box coordinates must be finite, got {vals}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValidationError(f"box min must not exceed max, got {vals}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min


class Polygon:
    """Simple polygon over >= 3 vertices.

    Construction validates and canonicalizes: consecutive duplicate
    vertices (and a repeated closing vertex) are dropped, orientation is
    flipped to counter-clockwise if needed, and degenerate or properly
    self-intersecting vertex cycles are rejected. Vertices that merely
    touch at shared points are accepted; raster contours of diagonally
    connected components revisit their pinch corners.
    """

    __slots__ = ("_vertices",)

    def __init__(self, vertices):
        arr = np.array(
            [(v.x, v.y) if isinstance(v, Point) else (v[0], v[1]) for v in vertices],
            dtype=np.float64,
        )
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValidationError("vertices must be a sequence of (x, y) pairs")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("polygon vertices must be finite")
        keep = np.any(arr != np.roll(arr, 1, axis=0), axis=1)
        arr = arr[keep]
        if arr.shape[0] < 3:
            raise ValidationError(f"polygon needs at least 3 distinct vertices, got {arr.shape[0]}")
        signed = _signed_area(arr)
        if signed == 0.0:
            raise ValidationError("polygon has zero area")
        if signed < 0.0:
            arr = np.concatenate([arr[:1], arr[:0:-1]], axis=0)
        if _has_proper_self_intersection(arr):
            raise ValidationError("polygon is self-intersecting")
        arr.setflags(write=False)
        self._vertices = arr

    @property
    def vertices(self) -> np.ndarray:
        """(N, 2) read-only float array of (x, y) vertices, counter-clockwise."""
        return self._vertices

    def __len__(self) -> int:
        return self._vertices.shape[0]

    def __repr__(self) -> str:
        pts = ", ".join(f"({x:g}, {y:g})" for x, y in self._vertices[:4])
        more = "" if len(self) <= 4 else f", ... {len(self)} vertices"
        return f"Polygon({pts}{more})"


def _signed_area(arr: np.ndarray) -> float:
    x, y = arr[:, 0], arr[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return float(np.sum(x * yn - xn * y)) / 2.0


def _has_proper_self_intersection(arr: np.ndarray) -> bool:
    # Strict transversal crossings only; shared endpoints are legal.
    n = arr.shape[0]
    a1 = arr
    a2 = np.roll(arr, -1, axis=0)

    def orient(p, q, r):
        return (q[:, 0] - p[:, 0])[:, None] * (r[None, :, 1] - p[:, None, 1]) - (
            q[:, 1] - p[:, 1]
        )[:, None] * (r[None, :, 0] - p[:, None, 0])

    d1 = orient(a1, a2, a1)
    d2 = orient(a1, a2, a2)
    crossing = (np.sign(d1) * np.sign(d2) < 0) & (np.sign(d1.T) * np.sign(d2.T) < 0)
    idx = np.arange(n)
    adjacent = (np.abs(idx[:, None] - idx[None, :]) % (n - 1)) <= 1
    return bool(np.any(crossing & ~adjacent))


def area(p: Polygon) -> float:
    """Shoelace area of the vertex cycle, in px^2."""
    return abs(_signed_area(p.vertices))


def perimeter(p: Polygon) -> float:
    """Sum of edge lengths of the closed cycle, in px."""
    v = p.vertices
    return float(np.sum(np.hypot(*(np.roll(v, -1, axis=0) - v).T)))


def min_aabb(p: Polygon) -> AxisAlignedBox:
    """Tight coordinate-wise bounding box."""
    v = p.vertices
    return AxisAlignedBox(
        float(v[:, 0].min()), float(v[:, 1].min()), float(v[:, 0].max()), float(v[:, 1].max())
    )


def _cos_sin(angle_deg: float) -> tuple[float, float]:
    # Snap values that are within fp noise of exact right angles so that
    # 90-degree rotations and canvas-size arithmetic stay exact.
    rad = math.radians(angle_deg)
    c, s = math.cos(rad), math.sin(rad)
    for exact in (-1.0, 0.0, 1.0):
        if abs(c - exact) < 1e-12:
            c = exact
        if abs(s - exact) < 1e-12:
            s = exact
    return c, s


def rotate_polygon(p: Polygon, angle_deg: float, center: Point) -> Polygon:
    """Rotate every vertex rigidly by angle_deg counter-clockwise about center."""
    c, s = _cos_sin(angle_deg)
    v = p.vertices - np.array([center.x, center.y])
    rotated = np.column_stack([v[:, 0] * c - v[:, 1] * s, v[:, 0] * s + v[:, 1] * c])
    return Polygon(rotated + np.array([center.x, center.y]))


def points_in_polygon(p: Polygon, xs, ys) -> np.ndarray:
    """Even-odd containment test for arrays of points; boundary counts as inside."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    shape = xs.shape
    px = xs.ravel()[None, :]
    py = ys.ravel()[None, :]
    v = p.vertices
    x1 = v[:, 0][:, None]
    y1 = v[:, 1][:, None]
    x2 = np.roll(v[:, 0], -1)[:, None]
    y2 = np.roll(v[:, 1], -1)[:, None]

    crosses = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    inside = np.count_nonzero(crosses & (px < x_at), axis=0) % 2 == 1

    # Boundary inclusion: squared distance to any edge within tolerance.
    dx = x2 - x1
    dy = y2 - y1
    len2 = dx * dx + dy * dy
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(((px - x1) * dx + (py - y1) * dy) / len2, 0.0, 1.0)
    t = np.where(len2 > 0, t, 0.0)
    d2 = (px - (x1 + t * dx)) ** 2 + (py - (y1 + t * dy)) ** 2
    on_edge = np.any(d2 <= 1e-18, axis=0)

    return (inside | on_edge).reshape(shape)


def point_in_polygon(p: Polygon, q: Point) -> bool:
    """True iff q is strictly inside p or on its boundary."""
    return bool(points_in_polygon(p, np.array([q.x]), np.array([q.y]))[0])


def _to_shapely(p: Polygon):
    s = _ShapelyPolygon(p.vertices)
    if not s.is_valid:
        # Weakly simple inputs (pinch corners) are legal here; split them
        # into their valid lobes before handing them to GEOS overlay ops.
        s = shapely.make_valid(s)
    return s


def _offset_quad_segs(delta: float) -> int:
    # Segments per quarter circle so that arc chords deviate by at most
    # ARC_TOLERANCE from the true offset circle of radius |delta|.
    if abs(delta) <= ARC_TOLERANCE:
        return 1
    step = 2.0 * math.acos(max(-1.0, 1.0 - ARC_TOLERANCE / abs(delta)))
    return max(1, math.ceil((math.pi / 2.0) / step))


def offset(p: Polygon, delta: float) -> list[Polygon]:
    """Offset the polygon boundary by a signed distance.

    Negative delta shrinks, positive dilates; round joins are used,
    flattened to polylines within ARC_TOLERANCE. A shrink may return an
    empty list (the polygon vanished) or several pieces (it split);
    a dilation returns exactly one polygon. Holes that a dilation closes
    off are dropped; only exterior rings are returned.
    """
    if not math.isfinite(delta):
        raise ValidationError(f"offset distance must be finite, got {delta}")
    if delta == 0.0:
        return [p]
    buffered = _to_shapely(p).buffer(delta, quad_segs=_offset_quad_segs(delta), join_style="round")
    if buffered.is_empty:
        return []
    parts = list(buffered.geoms) if buffered.geom_type == "MultiPolygon" else [buffered]
    pieces = [Polygon(np.asarray(part.exterior.coords)[:-1]) for part in parts]
    pieces.sort(key=lambda q: (q.vertices[:, 1].min(), q.vertices[:, 0].min()))
    return pieces


def polygon_iou(a: Polygon, b: Polygon) -> float:
    """area(a & b) / area(a | b) by exact polygon clipping, in [0, 1]."""
    sa = _to_shapely(a)
    sb = _to_shapely(b)
    inter = sa.intersection(sb).area
    union = sa.union(sb).area
    if union == 0.0:
        return 0.0
    return float(inter / union)


def intersection_area(a: Polygon, b: Polygon) -> float:
    """area(a & b) by exact polygon clipping."""
    return float(_to_shapely(a).intersection(_to_shapely(b)).area)

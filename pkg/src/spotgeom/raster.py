"""Bridges between continuous polygons and discrete pixel grids.

Binary maps are (H, W) uint8 arrays with values in {0, 1}; label maps
are (H, W) int32 arrays where 0 is background and component ids run
contiguously from 1 in raster-scan discovery order.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage
from shapely.geometry import Polygon as _ShapelyPolygon

from .geometry import Polygon, ValidationError, min_aabb, points_in_polygon

_EIGHT_CONNECTED = np.ones((3, 3), dtype=np.int32)

# Crack-walk directions in (dx, dy); the preferred turn at an ambiguous
# pinch corner crosses over to the diagonally connected pixel so a whole
# 8-connected component stays on a single boundary loop.
_STEP = {"R": (1, 0), "D": (0, 1), "L": (-1, 0), "U": (0, -1)}
_PINCH_TURN = {"D": "R", "U": "L", "L": "D", "R": "U"}


def check_binary_map(values) -> np.ndarray:
    """Validate and return an (H, W) array with values in {0, 1}."""
    arr = np.asarray(values)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"binary map must be a non-empty 2-d grid, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValidationError("binary map values must be 0 or 1")
    return arr.astype(np.uint8, copy=False)


def rasterize_polygon(p: Polygon, height: int, width: int) -> np.ndarray:
    """Fill a polygon onto an all-zero canvas.

    A pixel is set to 1 iff its center (j + 0.5, i + 0.5) lies inside the
    polygon (even-odd rule, boundary inclusive). Regions outside the
    canvas are clipped.
    """
    if height < 1 or width < 1:
        raise ValidationError(f"canvas dimensions must be positive, got {height}x{width}")
    out = np.zeros((height, width), dtype=np.uint8)
    box = min_aabb(p)
    j0 = max(0, math.floor(box.x_min - 0.5))
    j1 = min(width - 1, math.ceil(box.x_max))
    i0 = max(0, math.floor(box.y_min - 0.5))
    i1 = min(height - 1, math.ceil(box.y_max))
    if j0 > j1 or i0 > i1:
        return out
    jj, ii = np.meshgrid(np.arange(j0, j1 + 1), np.arange(i0, i1 + 1))
    inside = points_in_polygon(p, jj + 0.5, ii + 0.5)
    out[i0 : i1 + 1, j0 : j1 + 1] = inside.astype(np.uint8)
    return out


def connected_components(binary) -> np.ndarray:
    """Label 8-connected foreground components.

    Returns an int32 label map whose ids form the contiguous range 1..K
    ordered by each component's first pixel in raster-scan order.
    """
    arr = check_binary_map(binary)
    raw, count = ndimage.label(arr, structure=_EIGHT_CONNECTED)
    if count == 0:
        return raw.astype(np.int32)
    flat = raw.ravel()
    ids, first = np.unique(flat, return_index=True)
    keep = ids != 0
    ids, first = ids[keep], first[keep]
    lut = np.zeros(count + 1, dtype=np.int32)
    lut[ids[np.argsort(first)]] = np.arange(1, len(ids) + 1)
    return lut[raw]


def component_sizes(labels: np.ndarray) -> np.ndarray:
    """Pixel count per label id; index 0 holds the background count."""
    return np.bincount(labels.ravel())


def trace_contour(labels: np.ndarray, label: int) -> Polygon:
    """Trace the outer boundary of one component along pixel edges.

    The walk follows cracks (edges between component and non-component
    pixels) with the component kept on a consistent side, producing a
    polygon with integer-lattice vertices that encloses exactly the
    component's pixel centers. Interior holes are ignored.
    """
    if label < 1 or not np.any(labels == label):
        raise ValueError(f"label {label} does not exist in the label map")
    mask = labels == label
    padded = np.zeros((mask.shape[0] + 2, mask.shape[1] + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask

    outgoing: dict[tuple[int, int], dict[str, bool]] = {}

    def add_edges(rows, cols, direction, corner_dx, corner_dy):
        for i, j in zip(rows, cols):
            corner = (int(j) + corner_dx, int(i) + corner_dy)
            outgoing.setdefault(corner, {})[direction] = True

    fg = padded[1:-1, 1:-1]
    up_bg = ~padded[:-2, 1:-1]
    down_bg = ~padded[2:, 1:-1]
    left_bg = ~padded[1:-1, :-2]
    right_bg = ~padded[1:-1, 2:]
    r, c = np.nonzero(fg & up_bg)
    add_edges(r, c, "R", 0, 0)
    r, c = np.nonzero(fg & right_bg)
    add_edges(r, c, "D", 1, 0)
    r, c = np.nonzero(fg & down_bg)
    add_edges(r, c, "L", 1, 1)
    r, c = np.nonzero(fg & left_bg)
    add_edges(r, c, "U", 0, 1)

    rows, cols = np.nonzero(mask)
    start = (int(cols[0]), int(rows[0]))
    direction = "R"
    vertices = [start]
    corner = start
    while True:
        del outgoing[corner][direction]
        dx, dy = _STEP[direction]
        corner = (corner[0] + dx, corner[1] + dy)
        if corner == start:
            break
        options = outgoing[corner]
        if len(options) == 1:
            next_direction = next(iter(options))
        else:
            next_direction = _PINCH_TURN[direction]
        if next_direction != direction:
            vertices.append(corner)
        direction = next_direction
    return Polygon(vertices)


def simplify_contour(p: Polygon, epsilon: float) -> Polygon:
    """Douglas-Peucker simplification with the given tolerance in px."""
    if epsilon <= 0:
        return p
    simplified = _ShapelyPolygon(p.vertices).simplify(epsilon, preserve_topology=True)
    coords = np.asarray(simplified.exterior.coords)[:-1]
    if coords.shape[0] < 3:
        return p
    return Polygon(coords)

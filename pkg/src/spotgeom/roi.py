"""RoI extraction and polygon masking over feature grids.

Feature grids are (C, H, W) float arrays in the shared pixel-center
coordinate frame. RoI sampling takes one bilinear sample per output bin
at the bin center; reads outside the grid see zeros, since dilated
proposals routinely overhang image borders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import AxisAlignedBox, Polygon, ValidationError, points_in_polygon

MASK_SIZE = 32


@dataclass(frozen=True)
class RoiGrid:
    """Fixed-size feature patch sampled from a source box."""

    values: np.ndarray  # (C, n, n) float64
    source_box: AxisAlignedBox


@dataclass(frozen=True)
class PolygonMask:
    """Binary polygon stencil aligned to a source box."""

    values: np.ndarray  # (n, n) uint8
    source_box: AxisAlignedBox


def check_feature_grid(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise ValidationError(f"feature grid must be a (C, H, W) array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError("feature grid values must be finite")
    return arr


def bilinear_sample(values: np.ndarray, xs, ys) -> np.ndarray:
    """Bilinearly interpolate a (C, H, W) grid at continuous points.

    Sample positions are image coordinates; the value at pixel (i, j) is
    anchored at its center (j + 0.5, i + 0.5) and everything beyond the
    grid reads as zero. Returns an array of shape (C,) + xs.shape.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    shape = xs.shape
    c, h, w = values.shape
    gx = xs.ravel() - 0.5
    gy = ys.ravel() - 0.5
    x0 = np.floor(gx).astype(np.int64)
    y0 = np.floor(gy).astype(np.int64)
    fx = gx - x0
    fy = gy - y0

    out = np.zeros((c, gx.size), dtype=np.float64)
    for dy in (0, 1):
        for dx in (0, 1):
            xi = x0 + dx
            yi = y0 + dy
            weight = (fx if dx else 1.0 - fx) * (fy if dy else 1.0 - fy)
            valid = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
            if not valid.any():
                continue
            vals = values[:, yi[valid], xi[valid]]
            out[:, valid] += weight[valid] * vals
    return out.reshape((c,) + shape)


def _bin_centers(box: AxisAlignedBox, out_size: int) -> tuple[np.ndarray, np.ndarray]:
    steps = (np.arange(out_size) + 0.5) / out_size
    xs = box.x_min + steps * box.width
    ys = box.y_min + steps * box.height
    return np.meshgrid(xs, ys)


def roi_align(features, box: AxisAlignedBox, out_size: int = MASK_SIZE) -> RoiGrid:
    """Sample a fixed out_size x out_size grid from the box region.

    The box is divided into out_size^2 equal bins and each output cell
    takes one bilinear sample at its bin center. The box may exceed the
    feature bounds; a zero-extent box is rejected.
    """
    arr = check_feature_grid(features)
    if box.width <= 0 or box.height <= 0:
        raise ValidationError(f"box must have positive extent, got {box}")
    if out_size < 1:
        raise ValidationError(f"output size must be positive, got {out_size}")
    xs, ys = _bin_centers(box, out_size)
    return RoiGrid(values=bilinear_sample(arr, xs, ys), source_box=box)


def render_polygon_mask(p: Polygon, box: AxisAlignedBox, out_size: int = MASK_SIZE) -> PolygonMask:
    """Render the polygon as a binary stencil in the box frame.

    A cell is 1 iff its bin center, mapped from the box frame into image
    coordinates, lies inside the polygon.
    """
    if box.width <= 0 or box.height <= 0:
        raise ValidationError(f"box must have positive extent, got {box}")
    if out_size < 1:
        raise ValidationError(f"output size must be positive, got {out_size}")
    xs, ys = _bin_centers(box, out_size)
    return PolygonMask(values=points_in_polygon(p, xs, ys).astype(np.uint8), source_box=box)


def hard_roi_mask(roi: RoiGrid, mask: PolygonMask) -> RoiGrid:
    """Zero the RoI feature outside the polygon stencil.

    Cells where the mask is 1 pass through bit-identically; cells where
    it is 0 become exactly 0 in every channel.
    """
    if roi.values.shape[1:] != mask.values.shape:
        raise ValidationError(
            f"spatial sizes differ: {roi.values.shape[1:]} vs {mask.values.shape}"
        )
    if roi.source_box != mask.source_box:
        raise ValidationError("RoI and mask were sampled from different boxes")
    masked = np.where(mask.values.astype(bool), roi.values, 0.0)
    return RoiGrid(values=masked, source_box=roi.source_box)


def soft_roi_mask(roi: RoiGrid, probabilities) -> RoiGrid:
    """Scale the RoI feature by a probability stencil in [0, 1]."""
    prob = np.asarray(probabilities, dtype=np.float64)
    if roi.values.shape[1:] != prob.shape:
        raise ValidationError(f"spatial sizes differ: {roi.values.shape[1:]} vs {prob.shape}")
    if not np.isfinite(prob).all() or prob.min() < 0.0 or prob.max() > 1.0:
        raise ValidationError("probability stencil values must lie in [0, 1]")
    return RoiGrid(values=roi.values * prob, source_box=roi.source_box)

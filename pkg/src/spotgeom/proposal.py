"""Polygonal proposal extraction from a text-probability map.

The inference-side counterpart of the shrunk training target: threshold
the probability map, group connected regions, trace each region's
contour and dilate it back out by area * ratio / perimeter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import AxisAlignedBox, Polygon, ValidationError, area, min_aabb, offset, perimeter, points_in_polygon
from .raster import component_sizes, connected_components, trace_contour

BINARIZE_THRESHOLD = 0.5
UNCLIP_RATIO = 3.0
MIN_COMPONENT_AREA = 9


def check_probability_map(values) -> np.ndarray:
    """Validate and return an (H, W) float array with values in [0, 1]."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"probability map must be a non-empty 2-d grid, got shape {arr.shape}")
    if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
        raise ValidationError("probability map values must lie in [0, 1]")
    return arr


@dataclass(frozen=True)
class Proposal:
    """One detected region: dilated polygon plus its source contour."""

    polygon: Polygon
    shrunk_region: Polygon
    box: AxisAlignedBox
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(f"score must be in [0, 1], got {self.score}")
        if self.box != min_aabb(self.polygon):
            raise ValidationError("box must be the polygon's minimum axis-aligned box")
        v = self.shrunk_region.vertices
        if not points_in_polygon(self.polygon, v[:, 0], v[:, 1]).all():
            raise ValidationError("shrunk region must lie inside the proposal polygon")


def binarize(probability_map, threshold: float = BINARIZE_THRESHOLD) -> np.ndarray:
    """Threshold a probability map: 1 where the value is >= threshold."""
    arr = check_probability_map(probability_map)
    if not 0.0 <= threshold <= 1.0:
        raise ValidationError(f"threshold must be in [0, 1], got {threshold}")
    return (arr >= threshold).astype(np.uint8)


def unclip_offset(region_area: float, region_perimeter: float, ratio: float = UNCLIP_RATIO) -> float:
    """Outward offset distance: area * ratio / perimeter."""
    if region_area <= 0 or region_perimeter <= 0:
        raise ValidationError("area and perimeter must be positive")
    if ratio <= 0:
        raise ValidationError(f"unclip ratio must be positive, got {ratio}")
    return region_area * ratio / region_perimeter


def extract_proposals(
    probability_map,
    threshold: float = BINARIZE_THRESHOLD,
    unclip_ratio: float = UNCLIP_RATIO,
    min_area: float = MIN_COMPONENT_AREA,
) -> list[Proposal]:
    """Run the full map-to-polygons pipeline for one image.

    Components smaller than min_area pixels are dropped as noise. Each
    surviving component contributes one proposal whose score is the mean
    probability over the component's pixels; proposals are returned in
    component discovery order and the result is deterministic.
    """
    prob = check_probability_map(probability_map)
    labels = connected_components(binarize(prob, threshold))
    sizes = component_sizes(labels)
    proposals = []
    for label in range(1, len(sizes)):
        if sizes[label] < min_area:
            continue
        contour = trace_contour(labels, label)
        d = unclip_offset(area(contour), perimeter(contour), unclip_ratio)
        dilated = offset(contour, d)[0]
        score = float(prob[labels == label].mean())
        proposals.append(
            Proposal(polygon=dilated, shrunk_region=contour, box=min_aabb(dilated), score=score)
        )
    return proposals


def predict_head_shape(fused_height: int, fused_width: int) -> tuple[int, int, int]:
    """Output shape of the segmentation prediction head.

    The head runs Conv(k3, s1, p1) then two stride-2 deconvolutions
    (k2, p0) over the fused feature map, collapsing channels
    256 -> 64 -> 64 -> 1 while upsampling 4x spatially.
    """
    if fused_height < 1 or fused_width < 1:
        raise ValidationError("fused map dimensions must be positive")

    def conv(size, kernel, stride, pad):
        return (size + 2 * pad - kernel) // stride + 1

    def deconv(size, kernel, stride, pad):
        return (size - 1) * stride - 2 * pad + kernel

    h, w = fused_height, fused_width
    h, w = conv(h, 3, 1, 1), conv(w, 3, 1, 1)
    h, w = deconv(h, 2, 2, 0), deconv(w, 2, 2, 0)
    h, w = deconv(h, 2, 2, 0), deconv(w, 2, 2, 0)
    return (1, h, w)

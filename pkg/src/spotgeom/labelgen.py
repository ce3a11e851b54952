"""Shrunk binary segmentation targets from polygon annotations.

Each annotated text region is contracted inward before rasterization so
that neighboring instances stay separated in the training target; the
contraction distance is area * (1 - ratio^2) / perimeter of the region.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Polygon, ValidationError, area, min_aabb, offset, perimeter
from .raster import rasterize_polygon

SHRINK_RATIO = 0.4


@dataclass(frozen=True)
class TextInstance:
    polygon: Polygon
    transcription: str = ""
    ignore: bool = False

    def __post_init__(self):
        if self.transcription == "" and not self.ignore:
            raise ValidationError("non-ignored instances need a transcription")


@dataclass(frozen=True)
class AnnotationSet:
    width: int
    height: int
    instances: tuple[TextInstance, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError(f"canvas must be positive, got {self.width}x{self.height}")
        object.__setattr__(self, "instances", tuple(self.instances))
        for k, inst in enumerate(self.instances):
            box = min_aabb(inst.polygon)
            # 1 px of slack: annotation tools commonly clip to the border.
            if box.x_min < -1 or box.y_min < -1 or box.x_max > self.width + 1 or box.y_max > self.height + 1:
                raise ValidationError(f"polygon at instance {k} extends past the canvas")


def shrink_offset(region_area: float, region_perimeter: float, ratio: float = SHRINK_RATIO) -> float:
    """Inward offset distance: area * (1 - ratio^2) / perimeter."""
    if region_area <= 0 or region_perimeter <= 0:
        raise ValidationError("area and perimeter must be positive")
    if not 0 <= ratio <= 1:
        raise ValidationError(f"shrink ratio must be in [0, 1], got {ratio}")
    return region_area * (1.0 - ratio * ratio) / region_perimeter


def make_seg_label(annotations: AnnotationSet, ratio: float = SHRINK_RATIO) -> np.ndarray:
    """Render the binary segmentation target for one image.

    Every non-ignored instance is shrunk by its offset distance and
    rasterized; the target is the pixel-wise union. Instances whose
    shrunk region vanishes, and ignored instances, contribute nothing.
    """
    label = np.zeros((annotations.height, annotations.width), dtype=np.uint8)
    for inst in annotations.instances:
        if inst.ignore:
            continue
        d = shrink_offset(area(inst.polygon), perimeter(inst.polygon), ratio)
        for piece in offset(inst.polygon, -d):
            label |= rasterize_polygon(piece, annotations.height, annotations.width)
    return label

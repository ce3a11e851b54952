"""Scene-text geometry toolkit: shrink labels, polygon proposals, RoI masking, evaluation."""

from .geometry import (
    ARC_TOLERANCE,
    AxisAlignedBox,
    Point,
    Polygon,
    ValidationError,
    area,
    intersection_area,
    min_aabb,
    offset,
    perimeter,
    point_in_polygon,
    points_in_polygon,
    polygon_iou,
    rotate_polygon,
)
from .raster import (
    connected_components,
    component_sizes,
    rasterize_polygon,
    simplify_contour,
    trace_contour,
)
from .labelgen import SHRINK_RATIO, AnnotationSet, TextInstance, make_seg_label, shrink_offset
from .proposal import (
    BINARIZE_THRESHOLD,
    MIN_COMPONENT_AREA,
    UNCLIP_RATIO,
    Proposal,
    binarize,
    extract_proposals,
    predict_head_shape,
    unclip_offset,
)
from .roi import (
    MASK_SIZE,
    PolygonMask,
    RoiGrid,
    bilinear_sample,
    hard_roi_mask,
    render_polygon_mask,
    roi_align,
    soft_roi_mask,
)
from .loss import LossResult, combined_loss, dice_loss
from .bench import (
    IOU_THRESHOLD,
    ROTATION_ANGLES,
    DetectionResult,
    EvalReport,
    Lexicon,
    detection_metrics,
    e2e_metrics,
    levenshtein,
    lexicon_correct,
    match_detections,
    normalize_transcription,
    rotate_item,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

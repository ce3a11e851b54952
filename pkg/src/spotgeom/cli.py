"""Command-line surface.

Every numeric parameter resolves as: explicit flag, then environment
variable (SPOTGEOM_ prefix), then the built-in default. Exit codes:
0 success, 1 I/O failure, 2 invalid input or malformed file, 3 index
out of range.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, fileio, labelgen, proposal, roi, visualize
from .geometry import ValidationError, min_aabb
from .fileio import FileFormatError
from .raster import simplify_contour

_ENV_PREFIX = "SPOTGEOM_"


def _resolve(flag_value, env_name: str, default: float) -> float:
    if flag_value is not None:
        return flag_value
    raw = os.environ.get(_ENV_PREFIX + env_name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ValidationError(f"environment variable {_ENV_PREFIX}{env_name}={raw!r} is not numeric") from exc


def _parse_canvas(text: str) -> tuple[int, int]:
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError as exc:
        raise ValidationError(f"canvas must look like HxW, got {text!r}") from exc


def cmd_labelgen(args) -> int:
    annotations = fileio.load_annotations(args.annotations)
    if args.canvas is not None:
        h, w = _parse_canvas(args.canvas)
        annotations = labelgen.AnnotationSet(width=w, height=h, instances=annotations.instances)
    ratio = _resolve(args.shrink_ratio, "SHRINK_RATIO", labelgen.SHRINK_RATIO)
    label = labelgen.make_seg_label(annotations, ratio)
    fileio.write_label_png(label, args.out)
    return 0


def cmd_propose(args) -> int:
    threshold = _resolve(args.threshold, "THRESHOLD", proposal.BINARIZE_THRESHOLD)
    unclip_ratio = _resolve(args.unclip_ratio, "UNCLIP_RATIO", proposal.UNCLIP_RATIO)
    min_area = _resolve(args.min_area, "MIN_AREA", proposal.MIN_COMPONENT_AREA)
    if not 0.0 <= threshold <= 1.0:
        raise ValidationError("threshold out of range")
    prob = fileio.read_probability_png(args.segmap)
    proposals = proposal.extract_proposals(prob, threshold, unclip_ratio, min_area)
    if args.simplify_epsilon and args.simplify_epsilon > 0:
        simplified = []
        for p in proposals:
            poly = simplify_contour(p.polygon, args.simplify_epsilon)
            simplified.append(
                proposal.Proposal(
                    polygon=poly, shrunk_region=p.shrunk_region, box=min_aabb(poly), score=p.score
                )
            )
        proposals = simplified
    fileio.save_proposals(proposals, args.out)
    return 0


def cmd_maskroi(args) -> int:
    features = fileio.read_tensor(args.features)
    proposals = fileio.load_proposals(args.proposals)
    if not 0 <= args.index < len(proposals):
        raise IndexError(f"proposal index {args.index} out of range, file has {len(proposals)}")
    mask_size = int(_resolve(args.mask_size, "MASK_SIZE", roi.MASK_SIZE))
    chosen = proposals[args.index]
    aligned = roi.roi_align(features.astype(np.float64), chosen.box, mask_size)
    stencil = roi.render_polygon_mask(chosen.polygon, chosen.box, mask_size)
    masked = roi.hard_roi_mask(aligned, stencil)
    fileio.write_tensor(masked.values, args.out)
    return 0


def cmd_rotate(args) -> int:
    if args.angle is None and not args.angles:
        raise ValidationError("one of --angle or --angles is required")
    angles = [args.angle] if args.angle is not None else [float(a) for a in args.angles.split(",")]
    image = fileio.read_image(args.image)
    annotations = fileio.load_annotations(args.annotations)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.image).stem
    for angle in angles:
        rotated_image, rotated_annotations = bench.rotate_item(image, annotations, angle)
        fileio.write_image(rotated_image, out_dir / f"{stem}_rot{angle:g}.png")
        fileio.save_annotations(rotated_annotations, out_dir / f"{stem}_rot{angle:g}.json")
    return 0


def cmd_eval(args) -> int:
    iou = _resolve(args.iou, "IOU", bench.IOU_THRESHOLD)
    ground_truth = fileio.load_eval_ground_truth(args.gt)
    predictions = fileio.load_eval_predictions(args.pred)
    missing_pred = sorted(set(ground_truth) - set(predictions))
    missing_gt = sorted(set(predictions) - set(ground_truth))
    if missing_pred or missing_gt:
        raise ValidationError(
            f"image keys differ; missing from predictions: {missing_pred}, "
            f"missing from ground truth: {missing_gt}"
        )
    lexicon = None
    if args.lexicon is not None:
        lexicon = fileio.load_lexicon(args.lexicon, args.lexicon_kind)
    reports = []
    for key in sorted(ground_truth):
        gts = ground_truth[key].instances
        dets = predictions[key]
        if args.task == "det":
            reports.append(bench.match_detections(gts, dets, iou))
        else:
            reports.append(
                bench.e2e_metrics(
                    gts, dets, iou, lexicon=lexicon, word_spotting=args.task == "spotting"
                )
            )
    total = bench.detection_metrics(reports)
    if args.figure is not None:
        visualize.metrics_figure(total, args.figure)
    print(
        json.dumps(
            {
                "precision": total.precision,
                "recall": total.recall,
                "f_measure": total.f_measure,
                "matched": total.matched,
                "total_gt": total.total_gts,
                "total_det": total.total_dets,
            }
        )
    )
    return 0


def _load_overlay_polygons(path):
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if isinstance(data, dict) and "instances" in data:
        annotations = fileio.annotation_set_from_dict(data)
        polygons = [inst.polygon for inst in annotations.instances]
        return polygons, annotations.width, annotations.height
    proposals = fileio.proposals_from_list(data)
    polygons = [p.polygon for p in proposals]
    width = max((p.box.x_max for p in proposals), default=1.0)
    height = max((p.box.y_max for p in proposals), default=1.0)
    return polygons, math.ceil(width), math.ceil(height)


def cmd_visualize(args) -> int:
    polygons, width, height = _load_overlay_polygons(args.overlays)
    if args.image is not None:
        image = fileio.read_image(args.image)
        visualize.overlay_png(image, polygons, args.out, color=args.color)
    else:
        visualize.polygons_svg(polygons, width, height, args.out, color=args.color)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spotgeom",
        description="Shrink-label generation, polygon proposals, RoI masking and text-spotting evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("labelgen", help="render the shrunk segmentation target for one image")
    p.add_argument("annotations", help="annotation JSON file")
    p.add_argument("--out", required=True, help="output grayscale PNG")
    p.add_argument("--canvas", help="override canvas size as HxW")
    p.add_argument("--shrink-ratio", type=float, default=None)
    p.set_defaults(func=cmd_labelgen)

    p = sub.add_parser("propose", help="extract polygon proposals from a probability map PNG")
    p.add_argument("segmap", help="8-bit grayscale PNG, value/255 = probability")
    p.add_argument("--out", required=True, help="output proposal JSON")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--unclip-ratio", type=float, default=None)
    p.add_argument("--min-area", type=float, default=None)
    p.add_argument("--simplify-epsilon", type=float, default=0.0, help="Douglas-Peucker tolerance in px")
    p.set_defaults(func=cmd_propose)

    p = sub.add_parser("maskroi", help="sample and hard-mask one proposal's RoI from a feature tensor")
    p.add_argument("features", help="raw tensor file (C, H, W)")
    p.add_argument("proposals", help="proposal JSON file")
    p.add_argument("--index", type=int, required=True, help="proposal index to mask")
    p.add_argument("--out", required=True, help="output raw tensor file")
    p.add_argument("--mask-size", type=int, default=None)
    p.set_defaults(func=cmd_maskroi)

    p = sub.add_parser("rotate", help="rotate an image and annotations onto an expanded canvas")
    p.add_argument("image", help="input image (PNG)")
    p.add_argument("annotations", help="annotation JSON file")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--angle", type=float, default=None, help="single angle in degrees")
    p.add_argument("--angles", default=None, help="comma-separated batch, e.g. 15,30,45,60,75,90")
    p.set_defaults(func=cmd_rotate)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("task", choices=("det", "e2e", "spotting"))
    p.add_argument("gt", help="ground-truth JSON keyed by image")
    p.add_argument("pred", help="prediction JSON keyed by image")
    p.add_argument("--iou", type=float, default=None)
    p.add_argument("--lexicon", default=None, help="one-word-per-line lexicon file")
    p.add_argument("--lexicon-kind", choices=bench.LEXICON_KINDS, default="generic")
    p.add_argument("--figure", default=None, help="also render a metrics figure PNG here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("visualize", help="stroke proposal or annotation polygons")
    p.add_argument("overlays", help="proposal or annotation JSON file")
    p.add_argument("--out", required=True, help="output PNG (with --image) or SVG")
    p.add_argument("--image", default=None, help="backdrop image; omit for SVG output")
    p.add_argument("--color", default="red")
    p.set_defaults(func=cmd_visualize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FileFormatError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IndexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

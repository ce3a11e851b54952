"""Rotated-benchmark construction and detection/recognition scoring.

Detection scoring follows the usual IoU-matched protocol: detections
are greedily matched one-to-one against ground truth in descending
score order at a fixed IoU threshold, unreadable (ignore) regions count
neither for nor against, and precision/recall are micro-averaged over
the dataset. End-to-end scoring additionally requires the transcription
to match after normalization, optionally after lexicon correction.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    Polygon,
    ValidationError,
    _cos_sin,
    area,
    intersection_area,
    polygon_iou,
)
from .labelgen import AnnotationSet, TextInstance
from .roi import bilinear_sample

IOU_THRESHOLD = 0.5
IGNORE_OVERLAP = 0.5
ROTATION_ANGLES = (15.0, 30.0, 45.0, 60.0, 75.0, 90.0)
LEXICON_KINDS = ("strong", "weak", "generic")


@dataclass(frozen=True)
class DetectionResult:
    polygon: Polygon
    transcription: str = ""
    score: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(f"detection score must be in [0, 1], got {self.score}")


@dataclass(frozen=True)
class EvalReport:
    """Matching outcome; per-image reports carry the match list."""

    matched: int
    total_gts: int  # non-ignored ground-truth instances
    total_dets: int  # detections kept after ignore filtering
    ignored_gts: int
    ignored_dets: int
    matches: tuple[tuple[int, int, float], ...] = ()
    precision: float = field(init=False)
    recall: float = field(init=False)
    f_measure: float = field(init=False)

    def __post_init__(self):
        p = self.matched / self.total_dets if self.total_dets else 0.0
        r = self.matched / self.total_gts if self.total_gts else 0.0
        f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
        object.__setattr__(self, "precision", p)
        object.__setattr__(self, "recall", r)
        object.__setattr__(self, "f_measure", f)


@dataclass(frozen=True)
class Lexicon:
    """Correction vocabulary, deduplicated case-insensitively."""

    words: tuple[str, ...]
    kind: str = "generic"

    def __post_init__(self):
        if self.kind not in LEXICON_KINDS:
            raise ValidationError(f"lexicon kind must be one of {LEXICON_KINDS}, got {self.kind!r}")
        seen = set()
        unique = []
        for word in self.words:
            key = word.casefold()
            if key and key not in seen:
                seen.add(key)
                unique.append(word)
        if not unique:
            raise ValidationError("lexicon must contain at least one word")
        object.__setattr__(self, "words", tuple(unique))


def rotate_item(image: np.ndarray, annotations: AnnotationSet, angle_deg: float):
    """Rotate an image and its annotations onto an expanded canvas.

    The canvas grows to ceil(W|cos| + H|sin|) x ceil(W|sin| + H|cos|) so
    nothing is cropped; pixels are resampled bilinearly with black fill
    and each polygon is rotated about the original center then
    translated to the new one.
    """
    if not -180.0 <= angle_deg <= 180.0:
        raise ValidationError(f"angle must be in [-180, 180], got {angle_deg}")
    img = np.asarray(image)
    if img.ndim == 2:
        planes = img[None, :, :].astype(np.float64)
    elif img.ndim == 3:
        planes = np.moveaxis(img, 2, 0).astype(np.float64)
    else:
        raise ValidationError(f"image must be (H, W) or (H, W, C), got shape {img.shape}")

    h, w = img.shape[:2]
    c, s = _cos_sin(angle_deg)
    new_w = math.ceil(w * abs(c) + h * abs(s))
    new_h = math.ceil(w * abs(s) + h * abs(c))
    cx, cy = w / 2.0, h / 2.0
    ncx, ncy = new_w / 2.0, new_h / 2.0

    jj, ii = np.meshgrid(np.arange(new_w) + 0.5, np.arange(new_h) + 0.5)
    dx = jj - ncx
    dy = ii - ncy
    # Inverse map: rotate output centers by -angle back into the source.
    src_x = dx * c + dy * s + cx
    src_y = -dx * s + dy * c + cy
    sampled = bilinear_sample(planes, src_x, src_y)
    if np.issubdtype(img.dtype, np.integer):
        info = np.iinfo(img.dtype)
        sampled = np.clip(np.rint(sampled), info.min, info.max)
    rotated = sampled.astype(img.dtype)
    out_img = rotated[0] if img.ndim == 2 else np.moveaxis(rotated, 0, 2)

    shift = np.array([ncx - cx, ncy - cy])
    instances = []
    for inst in annotations.instances:
        v = inst.polygon.vertices - np.array([cx, cy])
        rotated_v = np.column_stack([v[:, 0] * c - v[:, 1] * s, v[:, 0] * s + v[:, 1] * c])
        moved = rotated_v + np.array([cx, cy]) + shift
        instances.append(
            TextInstance(Polygon(moved), transcription=inst.transcription, ignore=inst.ignore)
        )
    return out_img, AnnotationSet(width=new_w, height=new_h, instances=tuple(instances))


def _filter_ignored(gts, dets):
    """Split detections into kept and discarded against ignore regions."""
    ignored = [g.polygon for g in gts if g.ignore]
    kept = []
    discarded = 0
    for index, det in enumerate(dets):
        det_area = area(det.polygon)
        hits_ignore = any(
            intersection_area(det.polygon, ig) / det_area > IGNORE_OVERLAP for ig in ignored
        )
        if hits_ignore:
            discarded += 1
        else:
            kept.append(index)
    return kept, discarded


def _greedy_match(gts, dets, kept, iou_threshold):
    """Score-ordered one-to-one matching over non-ignored ground truth."""
    candidates = [g for g in range(len(gts)) if not gts[g].ignore]
    order = sorted(kept, key=lambda d: (-dets[d].score, d))
    taken = set()
    matches = []
    for d in order:
        best_gt, best_iou = -1, 0.0
        for g in candidates:
            if g in taken:
                continue
            iou = polygon_iou(gts[g].polygon, dets[d].polygon)
            if iou >= iou_threshold and iou > best_iou:
                best_gt, best_iou = g, iou
        if best_gt >= 0:
            taken.add(best_gt)
            matches.append((best_gt, d, best_iou))
    return matches, len(candidates)


def match_detections(gts, dets, iou_threshold: float = IOU_THRESHOLD) -> EvalReport:
    """Match one image's detections against its ground truth.

    Detections whose overlap with any ignore region exceeds half their
    own area are discarded before matching; each remaining detection, in
    descending score order, takes the unmatched non-ignored ground truth
    of highest IoU at or above the threshold.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise ValidationError(f"IoU threshold must be in (0, 1), got {iou_threshold}")
    kept, discarded = _filter_ignored(gts, dets)
    matches, n_valid_gts = _greedy_match(gts, dets, kept, iou_threshold)
    return EvalReport(
        matched=len(matches),
        total_gts=n_valid_gts,
        total_dets=len(kept),
        ignored_gts=len(gts) - n_valid_gts,
        ignored_dets=discarded,
        matches=tuple(matches),
    )


def detection_metrics(reports) -> EvalReport:
    """Micro-average per-image reports into one dataset-level report."""
    reports = list(reports)
    return EvalReport(
        matched=sum(r.matched for r in reports),
        total_gts=sum(r.total_gts for r in reports),
        total_dets=sum(r.total_dets for r in reports),
        ignored_gts=sum(r.ignored_gts for r in reports),
        ignored_dets=sum(r.ignored_dets for r in reports),
    )


def normalize_transcription(text: str) -> str:
    """Case-insensitive comparison form with surrounding punctuation removed."""
    return text.strip().strip(string.punctuation).casefold()


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insertions, deletions, substitutions)."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def lexicon_correct(pred: str, lexicon: Lexicon) -> str:
    """Replace a prediction with its closest lexicon word.

    Distance is case-insensitive Levenshtein; ties break
    lexicographically. If the best normalized distance
    (distance / max length) exceeds 0.5 the prediction is returned
    unchanged.
    """
    if not lexicon.words:
        raise ValidationError("lexicon is empty")
    key = pred.casefold()
    best = min(lexicon.words, key=lambda w: (levenshtein(key, w.casefold()), w.casefold(), w))
    distance = levenshtein(key, best.casefold())
    longest = max(len(key), len(best))
    if longest and distance / longest > 0.5:
        return pred
    return best


def e2e_metrics(
    gts,
    dets,
    iou_threshold: float = IOU_THRESHOLD,
    lexicon: Lexicon | None = None,
    word_spotting: bool = False,
    normalize=normalize_transcription,
) -> EvalReport:
    """End-to-end recognition scoring for one image.

    A detection counts only if its polygon matches per match_detections
    and its transcription equals the ground truth's after normalization.
    With a lexicon, predictions are corrected before comparison. In word
    spotting mode, ground truth that is not alphanumeric of length >= 3
    is treated as ignore.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise ValidationError(f"IoU threshold must be in (0, 1), got {iou_threshold}")
    if word_spotting:
        gts = [
            TextInstance(g.polygon, transcription=g.transcription, ignore=True)
            if not g.ignore and not (g.transcription.isalnum() and len(g.transcription) >= 3)
            else g
            for g in gts
        ]
    if lexicon is not None:
        dets = [
            DetectionResult(d.polygon, lexicon_correct(d.transcription, lexicon), d.score)
            for d in dets
        ]
    kept, discarded = _filter_ignored(gts, dets)
    matches, n_valid_gts = _greedy_match(gts, dets, kept, iou_threshold)
    correct = tuple(
        (g, d, iou)
        for g, d, iou in matches
        if normalize(dets[d].transcription) == normalize(gts[g].transcription)
    )
    return EvalReport(
        matched=len(correct),
        total_gts=n_valid_gts,
        total_dets=len(kept),
        ignored_gts=len(gts) - n_valid_gts,
        ignored_dets=discarded,
        matches=correct,
    )

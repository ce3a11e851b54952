"""File formats: annotation/proposal JSON, raw tensors, grayscale PNGs.

Annotation JSON for one image:

    {"width": int, "height": int,
     "instances": [{"polygon": [[x, y], ...],
                    "transcription": str, "ignore": bool}, ...]}

Proposal JSON is a list of {"polygon", "shrunk", "box", "score"}.
Evaluation files map an image key to an annotation object (ground
truth) or to a list of detection objects (predictions).

Raw tensor files carry a (C, H, W) float32 grid: magic b"SPNF", three
little-endian uint32 dims, then C*H*W little-endian float32 values in
channel-major row-major order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .bench import DetectionResult, Lexicon
from .geometry import AxisAlignedBox, Polygon, ValidationError
from .labelgen import AnnotationSet, TextInstance
from .proposal import Proposal

TENSOR_MAGIC = b"SPNF"


class FileFormatError(ValueError):
    """A file's content does not match its declared format."""


# --- annotation JSON ---------------------------------------------------


def annotation_set_to_dict(annotations: AnnotationSet) -> dict:
    return {
        "width": annotations.width,
        "height": annotations.height,
        "instances": [
            {
                "polygon": [[float(x), float(y)] for x, y in inst.polygon.vertices],
                "transcription": inst.transcription,
                "ignore": inst.ignore,
            }
            for inst in annotations.instances
        ],
    }


def annotation_set_from_dict(data: dict) -> AnnotationSet:
    if not isinstance(data, dict):
        raise FileFormatError("annotation document must be a JSON object")
    try:
        width = int(data["width"])
        height = int(data["height"])
        raw_instances = data["instances"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"annotation document missing field: {exc}") from exc
    instances = []
    for k, item in enumerate(raw_instances):
        try:
            polygon = Polygon(item["polygon"])
            instances.append(
                TextInstance(
                    polygon,
                    transcription=str(item.get("transcription", "")),
                    ignore=bool(item.get("ignore", False)),
                )
            )
        except (ValidationError, KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"invalid polygon at instance {k}: {exc}") from exc
    return AnnotationSet(width=width, height=height, instances=tuple(instances))


def load_annotations(path) -> AnnotationSet:
    with open(path, encoding="utf-8") as handle:
        return annotation_set_from_dict(json.load(handle))


def save_annotations(annotations: AnnotationSet, path) -> None:
    _write_json(annotation_set_to_dict(annotations), path)


# --- proposal / detection JSON ------------------------------------------


def proposals_to_list(proposals) -> list[dict]:
    return [
        {
            "polygon": [[float(x), float(y)] for x, y in p.polygon.vertices],
            "shrunk": [[float(x), float(y)] for x, y in p.shrunk_region.vertices],
            "box": [p.box.x_min, p.box.y_min, p.box.x_max, p.box.y_max],
            "score": p.score,
        }
        for p in proposals
    ]


def proposals_from_list(data) -> list[Proposal]:
    if not isinstance(data, list):
        raise FileFormatError("proposal document must be a JSON list")
    proposals = []
    for k, item in enumerate(data):
        try:
            proposals.append(
                Proposal(
                    polygon=Polygon(item["polygon"]),
                    shrunk_region=Polygon(item["shrunk"]),
                    box=AxisAlignedBox(*[float(v) for v in item["box"]]),
                    score=float(item["score"]),
                )
            )
        except (ValidationError, KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"invalid proposal at index {k}: {exc}") from exc
    return proposals


def save_proposals(proposals, path) -> None:
    _write_json(proposals_to_list(proposals), path)


def load_proposals(path) -> list[Proposal]:
    with open(path, encoding="utf-8") as handle:
        return proposals_from_list(json.load(handle))


def detections_from_list(data) -> list[DetectionResult]:
    """Read prediction entries; proposal JSON entries are accepted as-is."""
    if not isinstance(data, list):
        raise FileFormatError("prediction entries must form a JSON list")
    dets = []
    for k, item in enumerate(data):
        try:
            dets.append(
                DetectionResult(
                    polygon=Polygon(item["polygon"]),
                    transcription=str(item.get("transcription", "")),
                    score=float(item.get("score", 1.0)),
                )
            )
        except (ValidationError, KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"invalid detection at index {k}: {exc}") from exc
    return dets


def load_eval_ground_truth(path) -> dict[str, AnnotationSet]:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise FileFormatError("ground-truth file must map image keys to annotations")
    return {key: annotation_set_from_dict(value) for key, value in data.items()}


def load_eval_predictions(path) -> dict[str, list[DetectionResult]]:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise FileFormatError("prediction file must map image keys to detection lists")
    return {key: detections_from_list(value) for key, value in data.items()}


# --- raw tensor files -----------------------------------------------------


def write_tensor(values: np.ndarray, path) -> None:
    """Write a (C, H, W) float grid as a raw tensor file."""
    arr = np.ascontiguousarray(values, dtype="<f4")
    if arr.ndim != 3:
        raise ValidationError(f"tensor must be (C, H, W), got shape {arr.shape}")
    blob = TENSOR_MAGIC + struct.pack("<3I", *arr.shape) + arr.tobytes()
    _write_bytes(blob, path)


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as handle:
        blob = handle.read()
    if blob[:4] != TENSOR_MAGIC:
        raise FileFormatError(f"bad magic {blob[:4]!r}, expected {TENSOR_MAGIC!r}")
    if len(blob) < 16:
        raise FileFormatError(f"truncated header: {len(blob)} bytes, expected at least 16")
    c, h, w = struct.unpack("<3I", blob[4:16])
    expected = 16 + 4 * c * h * w
    if len(blob) != expected:
        raise FileFormatError(
            f"payload length mismatch: {len(blob)} bytes on disk, {expected} expected for {c}x{h}x{w}"
        )
    return np.frombuffer(blob[16:], dtype="<f4").reshape(c, h, w).copy()


# --- PNG maps and images ---------------------------------------------------


def write_label_png(binary: np.ndarray, path) -> None:
    """Write a binary map as 8-bit grayscale: 255 for 1, 0 for 0."""
    write_image(np.asarray(binary, dtype=np.uint8) * 255, path)


def read_probability_png(path) -> np.ndarray:
    """Read an 8-bit grayscale PNG as probabilities, value / 255."""
    with Image.open(path) as img:
        if img.mode != "L":
            raise FileFormatError(f"expected 8-bit grayscale input, got mode {img.mode!r}")
        return np.asarray(img, dtype=np.float64) / 255.0


def read_image(path) -> np.ndarray:
    with Image.open(path) as img:
        if img.mode == "L":
            return np.asarray(img)
        return np.asarray(img.convert("RGB"))


def write_image(values: np.ndarray, path) -> None:
    arr = np.asarray(values, dtype=np.uint8)
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    Image.fromarray(arr).save(tmp, format="PNG")
    tmp.replace(target)


# --- lexicon files ----------------------------------------------------------


def load_lexicon(path, kind: str = "generic") -> Lexicon:
    """Load a one-word-per-line UTF-8 lexicon."""
    words = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            word = line.strip()
            if word:
                words.append(word)
    return Lexicon(words=tuple(words), kind=kind)


def _write_json(payload, path) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    _write_bytes(text.encode("utf-8"), path)


def _write_bytes(blob: bytes, path) -> None:
    # Write via a sibling temp file so failures never leave partial output.
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_bytes(blob)
    tmp.replace(target)

"""Overlay and report figures rendered to files."""

from __future__ import annotations

from xml.sax.saxutils import quoteattr

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 100


def overlay_png(image: np.ndarray, polygons, path, color: str = "red", linewidth: float = 1.5) -> None:
    """Stroke polygons over an image and save a same-size PNG.

    The figure is sized 1:1 with the input so that, with no polygons,
    the output reproduces the input pixels exactly.
    """
    img = np.asarray(image)
    h, w = img.shape[:2]
    fig = plt.figure(figsize=(w / _DPI, h / _DPI), dpi=_DPI)
    ax = fig.add_axes([0, 0, 1, 1])
    ax.imshow(img, cmap="gray" if img.ndim == 2 else None, interpolation="none", vmin=0, vmax=255)
    for poly in polygons:
        closed = np.vstack([poly.vertices, poly.vertices[:1]])
        ax.plot(closed[:, 0] - 0.5, closed[:, 1] - 0.5, color=color, linewidth=linewidth)
    ax.set_xlim(-0.5, w - 0.5)
    ax.set_ylim(h - 0.5, -0.5)
    ax.set_axis_off()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def polygons_svg(polygons, width: float, height: float, path, color: str = "red") -> None:
    """Write polygons as one closed <path> element each, no raster backdrop."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
    ]
    for poly in polygons:
        points = " L ".join(f"{x:.6g},{y:.6g}" for x, y in poly.vertices)
        lines.append(
            f'  <path d="M {points} Z" fill="none" stroke={quoteattr(color)} stroke-width="1"/>'
        )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def metrics_figure(report, path) -> None:
    """Bar chart of precision/recall/F plus the raw match counts."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(8, 3.5), dpi=_DPI)
    names = ["precision", "recall", "f_measure"]
    values = [report.precision, report.recall, report.f_measure]
    left.bar(names, values, color=["#4878d0", "#ee854a", "#6acc64"])
    left.set_ylim(0, 1.05)
    left.set_title("metrics")
    for x, v in enumerate(values):
        left.text(x, v + 0.02, f"{v:.3f}", ha="center", fontsize=9)
    counts = {
        "matched": report.matched,
        "gts": report.total_gts,
        "dets": report.total_dets,
        "ignored\ngts": report.ignored_gts,
        "ignored\ndets": report.ignored_dets,
    }
    right.bar(list(counts), list(counts.values()), color="#956cb4")
    right.set_title("counts")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)

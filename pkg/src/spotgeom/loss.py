"""Dice overlap loss with its analytic gradient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ValidationError
from .raster import check_binary_map
from .proposal import check_probability_map


@dataclass(frozen=True)
class LossResult:
    value: float
    gradient: np.ndarray  # d(value)/d(prediction), same shape as the inputs


def dice_loss(prediction, target, valid_mask=None) -> LossResult:
    """Dice loss 1 - 2*I/U with I = sum(S*G) and U = sum(S) + sum(G).

    No smoothing term is added; when U is 0 the loss is defined as 0
    with a zero gradient. The gradient of each prediction cell is
    -2*G/U + 2*I/U^2. Cells excluded by valid_mask are dropped from all
    sums and get zero gradient.
    """
    s = check_probability_map(prediction)
    g = check_binary_map(target).astype(np.float64)
    if s.shape != g.shape:
        raise ValidationError(f"shape mismatch: {s.shape} vs {g.shape}")
    if valid_mask is None:
        valid = np.ones(s.shape, dtype=bool)
    else:
        valid = np.asarray(valid_mask, dtype=bool)
        if valid.shape != s.shape:
            raise ValidationError(f"valid mask shape {valid.shape} != map shape {s.shape}")

    intersection = float(np.sum(s * g, where=valid))
    union = float(np.sum(s, where=valid) + np.sum(g, where=valid))
    if union == 0.0:
        return LossResult(value=0.0, gradient=np.zeros_like(s))
    value = 1.0 - 2.0 * intersection / union
    gradient = np.where(valid, -2.0 * g / union + 2.0 * intersection / union**2, 0.0)
    return LossResult(value=value, gradient=gradient)


def combined_loss(
    seg_loss: float,
    rcnn_loss: float,
    mask_loss: float,
    rcnn_weight: float = 1.0,
    mask_weight: float = 1.0,
) -> float:
    """Total training loss: seg + w1 * rcnn + w2 * mask, both weights 1 by default.

    The rcnn and mask terms are produced by external detection and
    recognition heads; this helper only aggregates the scalars.
    """
    return seg_loss + rcnn_weight * rcnn_loss + mask_weight * mask_loss

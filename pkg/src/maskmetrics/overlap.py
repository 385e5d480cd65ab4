"""Confusion counts and overlap metrics for one binary mask pair.

The mask pair is scanned once into a ConfusionCounts; every metric is
then pure integer arithmetic, so requesting more metrics costs nothing.

Empty-mask conventions (chosen to keep CSV cells finite): when both
masks are empty, the agreement metrics (dice, jaccard, precision,
recall, vs) are 1.0 and the error rates (fpr, fnr) are 0.0.  When
exactly one side is empty, dice/jaccard are 0.0 and precision/recall
fall to 0.0 on their undefined side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimsMismatch
from .image_io import LabelVolume


@dataclass(frozen=True)
class BinaryMaskPair:
    """Reference and prediction masks on one shared grid."""

    reference: np.ndarray
    prediction: np.ndarray

    def __post_init__(self):
        reference = np.asarray(self.reference, dtype=bool)
        prediction = np.asarray(self.prediction, dtype=bool)
        if reference.shape != prediction.shape:
            raise DimsMismatch(
                f"mask dims differ: {reference.shape} vs {prediction.shape}"
            )
        object.__setattr__(self, "reference", reference)
        object.__setattr__(self, "prediction", prediction)

    @property
    def dims(self):
        return self.reference.shape


@dataclass(frozen=True)
class ConfusionCounts:
    """TP/FP/FN/TN voxel counts; always sums to the grid size."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def binarize(volume: LabelVolume, label: int) -> np.ndarray:
    """Boolean grid that is true exactly where the volume equals ``label``.

    A label absent from the volume simply yields an all-false grid.
    """
    return volume.voxels == int(label)


def confusion(pair: BinaryMaskPair) -> ConfusionCounts:
    """Count TP/FP/FN/TN voxels for the pair in a single pass."""
    tp = int(np.count_nonzero(pair.reference & pair.prediction))
    ref_total = int(np.count_nonzero(pair.reference))
    pred_total = int(np.count_nonzero(pair.prediction))
    fn = ref_total - tp
    fp = pred_total - tp
    tn = pair.reference.size - tp - fn - fp
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def dice(c: ConfusionCounts) -> float:
    """Dice / F1 overlap: 2*TP / (2*TP + FP + FN)."""
    denom = 2 * c.tp + c.fp + c.fn
    return 2 * c.tp / denom if denom else 1.0


def jaccard(c: ConfusionCounts) -> float:
    """Jaccard index (IoU): TP / (TP + FP + FN)."""
    denom = c.tp + c.fp + c.fn
    return c.tp / denom if denom else 1.0


def precision(c: ConfusionCounts) -> float:
    """Positive predictive value: TP / (TP + FP)."""
    denom = c.tp + c.fp
    if denom == 0:
        # empty prediction: perfect only if the reference is empty too
        return 1.0 if c.fn == 0 else 0.0
    return c.tp / denom


def recall(c: ConfusionCounts) -> float:
    """Sensitivity / true positive rate: TP / (TP + FN)."""
    denom = c.tp + c.fn
    if denom == 0:
        return 1.0 if c.fp == 0 else 0.0
    return c.tp / denom


def specificity(c: ConfusionCounts) -> float:
    """True negative rate: TN / (TN + FP)."""
    denom = c.tn + c.fp
    return c.tn / denom if denom else 1.0


def accuracy(c: ConfusionCounts) -> float:
    """Rand index: (TP + TN) / all voxels."""
    return (c.tp + c.tn) / c.total if c.total else 1.0


def fpr(c: ConfusionCounts) -> float:
    """False positive rate: FP / (FP + TN); complement of specificity."""
    denom = c.fp + c.tn
    return c.fp / denom if denom else 0.0


def fnr(c: ConfusionCounts) -> float:
    """False negative rate: FN / (FN + TP); complement of recall."""
    denom = c.fn + c.tp
    return c.fn / denom if denom else 0.0


def volume_similarity(c: ConfusionCounts) -> float:
    """Agreement of mask volumes regardless of position.

    1 - |FN - FP| / (2*TP + FP + FN); equal-sized masks score 1.0 even
    when they do not overlap.
    """
    denom = 2 * c.tp + c.fp + c.fn
    return 1.0 - abs(c.fn - c.fp) / denom if denom else 1.0

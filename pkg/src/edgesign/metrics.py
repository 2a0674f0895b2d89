"""Confusion accounting, Matthews correlation coefficient, accuracy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass
class ConfusionCounts:
    """Binary confusion counts with +1 as the positive class."""

    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self):
        return self.tp + self.tn + self.fp + self.fn


def confusion(predicted_labels, true_labels):
    """Count tp/tn/fp/fn between two ±1 label arrays of equal length."""
    pred = np.asarray(predicted_labels)
    truth = np.asarray(true_labels)
    if pred.shape != truth.shape:
        raise DataError(f"prediction covers {pred.size} edges, truth has {truth.size}")
    tp = int(np.count_nonzero((pred == 1) & (truth == 1)))
    tn = int(np.count_nonzero((pred == -1) & (truth == -1)))
    fp = int(np.count_nonzero((pred == 1) & (truth == -1)))
    fn = int(np.count_nonzero((pred == -1) & (truth == 1)))
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def mcc(c):
    """Matthews correlation coefficient in [-1, 1].

    (tp·tn − fp·fn) / sqrt((tp+fp)(tp+fn)(tn+fp)(tn+fn)), with the standard
    convention that a zero factor in the denominator yields 0 (degenerate
    single-class predictions).
    """
    denom = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn)
    if denom == 0:
        return 0.0
    return (c.tp * c.tn - c.fp * c.fn) / math.sqrt(denom)


def accuracy(c):
    """Fraction of correct predictions (nan on empty counts)."""
    if c.total == 0:
        return float("nan")
    return (c.tp + c.tn) / c.total

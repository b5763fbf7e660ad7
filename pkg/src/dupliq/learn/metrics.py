"""Binary classification metrics.

Hard labels come from thresholding predicted probabilities at 0.5.
Precision/recall treat class 1 as positive and are 0 when their
denominator is empty; log loss clips probabilities to
[LOG_LOSS_EPS, 1 - LOG_LOSS_EPS] before taking logs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOG_LOSS_EPS = 1e-15
PROBABILITY_THRESHOLD = 0.5


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    log_loss: float

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "log_loss": self.log_loss,
        }


def log_loss(y: np.ndarray, p: np.ndarray, eps: float = LOG_LOSS_EPS) -> float:
    y = np.asarray(y, dtype=np.float64)
    p = np.clip(np.asarray(p, dtype=np.float64), eps, 1.0 - eps)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def compute_metrics(y: np.ndarray, probabilities: np.ndarray) -> Metrics:
    y = np.asarray(y)
    if len(y) == 0:
        raise ValueError("cannot evaluate on an empty set")
    p = np.asarray(probabilities, dtype=np.float64)
    predictions = (p >= PROBABILITY_THRESHOLD).astype(np.int64)
    tp = int(np.sum((predictions == 1) & (y == 1)))
    fp = int(np.sum((predictions == 1) & (y == 0)))
    fn = int(np.sum((predictions == 0) & (y == 1)))
    accuracy = float(np.mean(predictions == y))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(accuracy, precision, recall, f1, log_loss(y, p))

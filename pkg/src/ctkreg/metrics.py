"""Goodness-of-fit scores and campaign result aggregation."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

# default evaluation grid for impulse-response fits: 0.0002 : 0.0002 : 10
IMPULSE_GRID_STEP = 0.0002
IMPULSE_GRID_END = 10.0


def impulse_grid(
    step: float = IMPULSE_GRID_STEP, end: float = IMPULSE_GRID_END
) -> np.ndarray:
    n = int(round(end / step))
    return step * np.arange(1, n + 1)


def fit_percent(estimate: np.ndarray, truth: np.ndarray) -> float:
    """100 * (1 - RMS(err) / RMS(truth - mean(truth))); 100 is a perfect fit."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError("estimate and truth must have the same shape")
    denom = np.linalg.norm(truth - np.mean(truth))
    if denom == 0:
        raise ValueError("truth is constant; the fit score is undefined")
    return float(100.0 * (1.0 - np.linalg.norm(estimate - truth) / denom))


def fit_impulse(ghat: np.ndarray, g_true: np.ndarray) -> float:
    """Impulse-response fit on a common lag grid."""
    return fit_percent(ghat, g_true)


def fit_output(yhat: np.ndarray, y0: np.ndarray) -> float:
    """Noiseless-output prediction fit on the validation window."""
    return fit_percent(yhat, y0)


@dataclass
class FitReport:
    """Per-trial scores for one data bank, with summary statistics."""

    bank: str
    metric: str                     # "fit_g" or "fit_y"
    scores: list[float] = field(default_factory=list)
    trials: list[int] = field(default_factory=list)

    def add(self, trial: int, score: float) -> None:
        self.trials.append(int(trial))
        self.scores.append(float(score))

    @property
    def mean(self) -> float:
        return float(np.mean(self.scores))

    @property
    def std(self) -> float:
        """Sample standard deviation (n - 1 in the denominator)."""
        return float(np.std(self.scores, ddof=1)) if len(self.scores) > 1 else 0.0

    def summary(self) -> dict:
        return {
            "bank": self.bank,
            "metric": self.metric,
            "n_trials": len(self.scores),
            "mean": self.mean,
            "std": self.std,
            "min": float(np.min(self.scores)),
            "max": float(np.max(self.scores)),
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bank", "metric", "trial", "score"])
            for trial, score in zip(self.trials, self.scores):
                writer.writerow([self.bank, self.metric, trial, f"{score:.6f}"])

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2)
            fh.write("\n")

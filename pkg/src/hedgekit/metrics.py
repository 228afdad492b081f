"""Evaluation metrics for scored binary (real/fake) cohorts.

Balanced accuracy, per-class accuracy, rank-based AUC, F1 for the fake
class, robustness restricted to perturbation-tagged subsets, and the focal
loss utility.  The decision threshold defaults to 0.5 with ties predicting
real, matching the prediction pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .core import SCORE_THRESHOLD, EvaluationError, InputError, Label

#: Perturbation tags the robustness headline numbers are defined on.
JPEG_ROBUSTNESS_TAG = "jpeg_qf90"
RESIZE_ROBUSTNESS_TAG = "resize_0.9"

#: Probability clamp applied before logarithms in the focal loss.
PROB_EPS = 1e-12


@dataclass(frozen=True)
class LabeledScore:
    """One evaluated sample: fused fake score plus ground truth."""

    sample_id: str
    fake_score: float
    label: Label
    perturbation: str = "clean"

    def __post_init__(self) -> None:
        if not (0.0 <= self.fake_score <= 1.0):
            raise InputError(f"fake_score {self.fake_score!r} outside [0, 1]")


@dataclass(frozen=True)
class MetricReport:
    """Headline metrics for a cohort, with per-perturbation sub-reports."""

    b_acc: float
    r_acc: float
    f_acc: float
    f1: float
    auc: float | None = None
    n_real: int = 0
    n_fake: int = 0
    per_perturbation: dict[str, "MetricReport"] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if abs(self.b_acc - (self.r_acc + self.f_acc) / 2.0) > 1e-12:
            raise EvaluationError("b_acc must be the mean of r_acc and f_acc")


def _split(rows: Sequence[LabeledScore]) -> tuple[list[LabeledScore], list[LabeledScore]]:
    real = [r for r in rows if r.label is Label.REAL]
    fake = [r for r in rows if r.label is Label.FAKE]
    return real, fake


def balanced_accuracy(
    rows: Sequence[LabeledScore], threshold: float = SCORE_THRESHOLD
) -> tuple[float, float, float]:
    """Per-class accuracies and their mean.

    A row predicts fake iff its score strictly exceeds the threshold, so
    real accuracy counts scores <= threshold and fake accuracy scores >
    threshold.  Returns (r_acc, f_acc, b_acc).
    """
    real, fake = _split(rows)
    if not real:
        raise EvaluationError("no rows labeled real")
    if not fake:
        raise EvaluationError("no rows labeled fake")
    r_acc = sum(1 for r in real if r.fake_score <= threshold) / len(real)
    f_acc = sum(1 for r in fake if r.fake_score > threshold) / len(fake)
    return r_acc, f_acc, (r_acc + f_acc) / 2.0


def auc(rows: Sequence[LabeledScore]) -> float:
    """Rank-based AUC: probability that a random fake row outranks a random
    real row, ties counting one half (Mann-Whitney with average ranks)."""
    real, fake = _split(rows)
    if not real or not fake:
        raise EvaluationError("AUC requires both classes")
    scores = np.array([r.fake_score for r in fake] + [r.fake_score for r in real])
    ranks = rankdata(scores, method="average")
    n_fake, n_real = len(fake), len(real)
    u = float(ranks[:n_fake].sum()) - n_fake * (n_fake + 1) / 2.0
    return u / (n_fake * n_real)


def f1(rows: Sequence[LabeledScore], threshold: float = SCORE_THRESHOLD) -> float:
    """F1 of the fake class at the given threshold; 0 when degenerate."""
    tp = sum(1 for r in rows if r.label is Label.FAKE and r.fake_score > threshold)
    fp = sum(1 for r in rows if r.label is Label.REAL and r.fake_score > threshold)
    fn = sum(1 for r in rows if r.label is Label.FAKE and r.fake_score <= threshold)
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2 * tp / denom


def robustness_metric(
    rows: Sequence[LabeledScore],
    clean_tag: str = "clean",
    perturbed_tag: str = JPEG_ROBUSTNESS_TAG,
    threshold: float = SCORE_THRESHOLD,
) -> float:
    """Balanced accuracy restricted to rows carrying ``perturbed_tag``.

    ``clean_tag`` names the undistorted reference subset for reporting
    purposes; the metric itself is defined on the perturbed subset only.
    """
    subset = [r for r in rows if r.perturbation == perturbed_tag]
    if not subset:
        raise EvaluationError(f"no rows tagged {perturbed_tag!r}")
    return balanced_accuracy(subset, threshold)[2]


def jpeg_robustness(rows: Sequence[LabeledScore]) -> float:
    return robustness_metric(rows, perturbed_tag=JPEG_ROBUSTNESS_TAG)


def resize_robustness(rows: Sequence[LabeledScore]) -> float:
    return robustness_metric(rows, perturbed_tag=RESIZE_ROBUSTNESS_TAG)


def focal_loss(p_fake: float, label: Label, gamma: float = 2.0) -> float:
    """Focal loss of a fake-probability against a ground-truth label.

    With p the (clamped) probability assigned to the true class, the loss
    is -(1 - p)^gamma * ln(p); gamma = 0 reduces to cross-entropy.
    """
    p_true = p_fake if label is Label.FAKE else 1.0 - p_fake
    p_true = min(max(p_true, PROB_EPS), 1.0)
    return -((1.0 - p_true) ** gamma) * math.log(p_true)


def focal_loss_grad(p_fake: float, label: Label, gamma: float = 2.0) -> float:
    """Derivative of :func:`focal_loss` with respect to ``p_fake``."""
    p_true = p_fake if label is Label.FAKE else 1.0 - p_fake
    p_true = min(max(p_true, PROB_EPS), 1.0)
    d_dp_true = gamma * (1.0 - p_true) ** (gamma - 1.0) * math.log(p_true) - (
        1.0 - p_true
    ) ** gamma / p_true
    return d_dp_true if label is Label.FAKE else -d_dp_true


def compute_report(
    rows: Sequence[LabeledScore], threshold: float = SCORE_THRESHOLD
) -> MetricReport:
    """Full metric report over a cohort plus per-perturbation sub-reports.

    Sub-reports are emitted for every tag whose subset contains both
    classes; single-class tags are skipped (their headline metrics are
    undefined).
    """
    r_acc, f_acc, b_acc = balanced_accuracy(rows, threshold)
    real, fake = _split(rows)
    sub: dict[str, MetricReport] = {}
    for tag in sorted({r.perturbation for r in rows}):
        subset = [r for r in rows if r.perturbation == tag]
        s_real, s_fake = _split(subset)
        if not s_real or not s_fake:
            continue
        sr, sf, sb = balanced_accuracy(subset, threshold)
        sub[tag] = MetricReport(
            b_acc=sb,
            r_acc=sr,
            f_acc=sf,
            f1=f1(subset, threshold),
            auc=auc(subset),
            n_real=len(s_real),
            n_fake=len(s_fake),
        )
    return MetricReport(
        b_acc=b_acc,
        r_acc=r_acc,
        f_acc=f_acc,
        f1=f1(rows, threshold),
        auc=auc(rows),
        n_real=len(real),
        n_fake=len(fake),
        per_perturbation=sub,
    )

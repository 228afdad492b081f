"""Cohort-level runners: ensemble evaluation, ablation table, sweeps."""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass

from ..core import (
    EnsembleConfig,
    EvaluationError,
    FusionStrategy,
    Label,
    LogitRecord,
    Prediction,
    View,
)
from ..distort import INTENSITY_GRIDS, perturbation_tag
from ..fusion import fuse_majority_vote
from ..gating import decide, merge_views
from ..metrics import LabeledScore, auc, balanced_accuracy, f1
from .records import Cohort


@dataclass(frozen=True)
class SamplePrediction:
    """A prediction joined with its cohort context."""

    prediction: Prediction
    perturbation: str = "clean"
    label: Label | None = None
    group: str | None = None


def _check_tta_views(records: list[LogitRecord], config: EnsembleConfig) -> None:
    present: dict = {}
    for rec in records:
        present.setdefault(rec.model_id, set()).add(rec.view)
    for model in config.tta_models:
        views = present.get(model, set())
        if views and View.HFLIP not in views:
            warnings.warn(
                f"TTA model {model.value} has a single view for sample "
                f"{records[0].sample_id!r}; merging what is available",
                stacklevel=3,
            )


def run_ensemble(
    cohort: Cohort, config: EnsembleConfig
) -> list[SamplePrediction]:
    """Decide every (sample, perturbation) of a cohort.

    Output is keyed and sorted by (sample_id, perturbation), independent of
    record order in the input.
    """
    labels = cohort.labels()
    results: list[SamplePrediction] = []
    for sample_id, tag in cohort.sample_keys:
        records = cohort.sample_records(sample_id, tag)
        _check_tta_views(records, config)
        prediction = decide(records, config)
        group = next((r.group for r in records if r.group is not None), None)
        results.append(
            SamplePrediction(
                prediction=prediction,
                perturbation=tag,
                label=labels.get(sample_id),
                group=group,
            )
        )
    return results


def labeled_scores(results: list[SamplePrediction]) -> list[LabeledScore]:
    """Convert labeled predictions into metric rows; unlabeled rows fail."""
    rows = []
    for res in results:
        if res.label is None:
            raise EvaluationError(
                f"sample {res.prediction.sample_id!r} has no ground-truth label"
            )
        rows.append(
            LabeledScore(
                sample_id=res.prediction.sample_id,
                fake_score=res.prediction.fake_score,
                label=res.label,
                perturbation=res.perturbation,
            )
        )
    return rows


@dataclass(frozen=True)
class AblationRow:
    """One fusion configuration evaluated on clean and perturbed subsets."""

    configuration: str
    clean_auc: float | None
    clean_f1: float
    clean_b_acc: float
    robust_auc: float | None
    robust_f1: float
    robust_b_acc: float


def _gates(config: EnsembleConfig, gate1: bool, gate2: bool) -> EnsembleConfig:
    return dataclasses.replace(
        config,
        strategy=FusionStrategy.WEIGHTED_LOGIT,
        gate1=dataclasses.replace(config.gate1, enabled=gate1),
        gate2=dataclasses.replace(config.gate2, enabled=gate2),
    )


ABLATION_CONFIGURATIONS = (
    "majority_vote",
    "prob_average",
    "equal_logit",
    "weighted_logit",
    "weighted_logit+gate1",
    "weighted_logit+gate2",
    "full",
)


def _majority_vote_rows(
    cohort: Cohort, config: EnsembleConfig
) -> list[LabeledScore]:
    # Majority voting yields labels only; represent them as degenerate 0/1
    # scores so the thresholded counts work, and never report an AUC.
    labels = cohort.labels()
    rows = []
    for sample_id, tag in cohort.sample_keys:
        if sample_id not in labels:
            raise EvaluationError(f"sample {sample_id!r} has no ground-truth label")
        outputs = merge_views(cohort.sample_records(sample_id, tag), config)
        voted = fuse_majority_vote(list(outputs.values()))
        rows.append(
            LabeledScore(
                sample_id=sample_id,
                fake_score=1.0 if voted is Label.FAKE else 0.0,
                label=labels[sample_id],
                perturbation=tag,
            )
        )
    return rows


def run_ablation(
    cohort: Cohort, config: EnsembleConfig, clean_tag: str = "clean"
) -> list[AblationRow]:
    """Evaluate the fusion-strategy and gating ablation grid.

    Requires a labeled cohort containing the clean tag and at least one
    perturbed tag; all perturbed tags are pooled into the robust subset.
    """
    tags = set(cohort.perturbations)
    if clean_tag not in tags:
        raise EvaluationError(f"cohort has no {clean_tag!r} rows")
    if tags == {clean_tag}:
        raise EvaluationError("cohort has no perturbed rows to ablate against")

    def scored(cfg: EnsembleConfig) -> list[LabeledScore]:
        return labeled_scores(run_ensemble(cohort, cfg))

    rows_by_configuration: dict[str, tuple[list[LabeledScore], bool]] = {
        "majority_vote": (_majority_vote_rows(cohort, config), False),
        "prob_average": (
            scored(
                dataclasses.replace(
                    _gates(config, False, False),
                    strategy=FusionStrategy.PROB_AVERAGE,
                )
            ),
            True,
        ),
        "equal_logit": (
            scored(
                dataclasses.replace(
                    _gates(config, False, False),
                    strategy=FusionStrategy.EQUAL_LOGIT,
                )
            ),
            True,
        ),
        "weighted_logit": (scored(_gates(config, False, False)), True),
        "weighted_logit+gate1": (scored(_gates(config, True, False)), True),
        "weighted_logit+gate2": (scored(_gates(config, False, True)), True),
        "full": (scored(_gates(config, True, True)), True),
    }

    table: list[AblationRow] = []
    for name in ABLATION_CONFIGURATIONS:
        rows, has_auc = rows_by_configuration[name]
        clean = [r for r in rows if r.perturbation == clean_tag]
        robust = [r for r in rows if r.perturbation != clean_tag]
        table.append(
            AblationRow(
                configuration=name,
                clean_auc=auc(clean) if has_auc else None,
                clean_f1=f1(clean),
                clean_b_acc=balanced_accuracy(clean)[2],
                robust_auc=auc(robust) if has_auc else None,
                robust_f1=f1(robust),
                robust_b_acc=balanced_accuracy(robust)[2],
            )
        )
    return table


def sweep_cohort(
    cohort: Cohort, config: EnsembleConfig, kind: str
) -> list[tuple[float, float]]:
    """Balanced accuracy at every declared intensity of one sweep grid.

    The cohort must carry one perturbation tag per grid point (see
    :func:`hedgekit.distort.perturbation_tag`); a missing tag is an error.
    """
    if kind not in INTENSITY_GRIDS:
        raise EvaluationError(f"unknown sweep kind {kind!r}")
    results = run_ensemble(cohort, config)
    rows = labeled_scores(results)
    out: list[tuple[float, float]] = []
    for intensity in INTENSITY_GRIDS[kind]:
        tag = perturbation_tag(kind, intensity)
        subset = [r for r in rows if r.perturbation == tag]
        if not subset:
            raise EvaluationError(f"cohort has no rows tagged {tag!r}")
        out.append((intensity, balanced_accuracy(subset)[2]))
    return out

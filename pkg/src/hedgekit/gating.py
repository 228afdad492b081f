"""Dual-gating robust decision pipeline.

Two rules refine plain weighted logit fusion, both driven by directional
evidence signs:

* Gate-1 (outlier suppression): when a quorum of the jury agrees on a
  direction that the designated outlier-prone branch opposes, that branch
  is dropped and the remaining weights are re-normalized.
* Gate-2 (consensus correction): when the two structurally distinct
  witness branches confidently agree (|d_a| >= tau1, |d_b| >= tau2) and the
  fused logit points the other way, the fused logit is shifted by delta
  toward them — once, whether or not the shift flips the sign.

Pipeline order is fixed: TTA merge, evidence, Gate-1, weighted fusion,
Gate-2, logistic score.  Gate-2 always tests the original (pre-exclusion)
witness evidences.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import (
    SCORE_THRESHOLD,
    BranchEvidence,
    ConfigurationError,
    EnsembleConfig,
    FusionStrategy,
    Gate1Params,
    Gate2Params,
    InputError,
    Label,
    LogitRecord,
    ModelId,
    Prediction,
    View,
    sign,
)
from .fusion import FusedOutput, ModelOutput, fuse_prob_average, fuse_weighted_logit, tta_merge


@dataclass(frozen=True)
class Gate1Decision:
    fired: bool
    agreeing_jury: frozenset[ModelId] = frozenset()


@dataclass(frozen=True)
class Gate2Decision:
    fired: bool
    corrected_d: float


@dataclass(frozen=True)
class GateTrace:
    """Audit trail of one pass through the gating pipeline."""

    gate1_fired: bool
    gate2_fired: bool
    agreeing_jury: frozenset[ModelId]
    pre_correction_d: float
    post_correction_d: float

    def __post_init__(self) -> None:
        if not self.gate2_fired and self.post_correction_d != self.pre_correction_d:
            raise ConfigurationError("fused logit changed without gate-2 firing")


def gate1_evaluate(
    evidences: Mapping[ModelId, BranchEvidence], params: Gate1Params
) -> Gate1Decision:
    """Decide whether the outlier branch is excluded from fusion.

    Fires iff, for some direction s, at least ``quorum`` jury models have
    sign(d) == s while the outlier model has sign(d) == -s.  Zero evidence
    agrees with neither direction.
    """
    required = set(params.jury) | {params.outlier_model}
    missing = required - set(evidences)
    if missing:
        raise InputError(
            f"missing evidence for {sorted(m.value for m in missing)}"
        )
    if not params.enabled:
        return Gate1Decision(fired=False)

    outlier_sign = sign(evidences[params.outlier_model].d)
    for direction in (1, -1):
        agreeing = frozenset(
            m for m in params.jury if sign(evidences[m].d) == direction
        )
        if len(agreeing) >= params.quorum and outlier_sign == -direction:
            return Gate1Decision(fired=True, agreeing_jury=agreeing)
    return Gate1Decision(fired=False)


def gate2_evaluate(
    d_a: float, d_b: float, fused_d: float, params: Gate2Params
) -> Gate2Decision:
    """Apply the consensus correction to a fused directional logit.

    Fires iff both witnesses share a strict sign, clear their confidence
    thresholds, and the fused logit strictly opposes them; the correction
    is a single shift of ``delta`` toward the witnesses.
    """
    if not params.enabled:
        return Gate2Decision(fired=False, corrected_d=fused_d)
    s = sign(d_a)
    fires = (
        s != 0
        and sign(d_b) == s
        and abs(d_a) >= params.tau1
        and abs(d_b) >= params.tau2
        and sign(fused_d) == -s
    )
    if not fires:
        return Gate2Decision(fired=False, corrected_d=fused_d)
    return Gate2Decision(fired=True, corrected_d=fused_d + s * params.delta)


def renormalize_weights(
    weights: Mapping[ModelId, float], excluded: Iterable[ModelId]
) -> dict[ModelId, float]:
    """Re-normalize weights to sum to 1 over the non-excluded models."""
    excluded = set(excluded)
    remaining = {m: w for m, w in weights.items() if m not in excluded}
    total = sum(remaining.values())
    if total <= 0:
        raise ConfigurationError("remaining ensemble weights sum to zero")
    return {m: w / total for m, w in remaining.items()}


def merge_views(
    records: Iterable[LogitRecord], config: EnsembleConfig
) -> dict[ModelId, ModelOutput]:
    """Group one sample's records by model and TTA-merge each model's views.

    TTA models average all their views; non-TTA models use the original
    view only.  All configured models must be present.
    """
    by_model: dict[ModelId, dict[View, LogitRecord]] = defaultdict(dict)
    sample_ids = set()
    for rec in records:
        sample_ids.add((rec.sample_id, rec.perturbation))
        if rec.view in by_model[rec.model_id]:
            raise InputError(
                f"duplicate view {rec.view.value} for {rec.model_id.value}"
            )
        by_model[rec.model_id][rec.view] = rec
    if len(sample_ids) > 1:
        raise InputError(f"records span multiple samples: {sorted(sample_ids)}")

    outputs: dict[ModelId, ModelOutput] = {}
    for model in config.models:
        views = by_model.get(model, {})
        if model in config.tta_models:
            chosen = [views[v] for v in (View.ORIG, View.HFLIP) if v in views]
        else:
            chosen = [views[View.ORIG]] if View.ORIG in views else []
        if not chosen:
            raise InputError(f"no usable view for {model.value}")
        outputs[model] = tta_merge(
            model, [(r.logit_real, r.logit_fake) for r in chosen]
        )
    return outputs


def decide(records: Iterable[LogitRecord], config: EnsembleConfig) -> Prediction:
    """Run the full decision pipeline on one sample's records."""
    prediction, _ = decide_traced(records, config)
    return prediction


def decide_traced(
    records: Iterable[LogitRecord], config: EnsembleConfig
) -> tuple[Prediction, GateTrace]:
    """Like :func:`decide`, also returning the gate audit trail."""
    records = list(records)
    if not records:
        raise InputError("no records supplied")
    sample_id = records[0].sample_id

    if config.strategy is FusionStrategy.MAJORITY_VOTE:
        raise ConfigurationError(
            "majority_vote yields labels without scores; "
            "use fuse_majority_vote or the ablation runner"
        )

    outputs = merge_views(records, config)
    evidences = {
        m: BranchEvidence(model_id=m, d=out.d) for m, out in outputs.items()
    }

    if config.strategy is FusionStrategy.PROB_AVERAGE:
        return _decide_prob_average(sample_id, outputs, config)

    if config.strategy is FusionStrategy.EQUAL_LOGIT:
        weights: Mapping[ModelId, float] = {
            m: 1.0 / len(outputs) for m in outputs
        }
    else:
        weights = config.weights

    g1 = gate1_evaluate(evidences, config.gate1)
    excluded: frozenset[ModelId] = frozenset()
    if g1.fired:
        excluded = frozenset({config.gate1.outlier_model})
        weights = renormalize_weights(weights, excluded)

    fused: FusedOutput = fuse_weighted_logit(
        [outputs[m] for m in sorted(weights, key=lambda m: m.value)], weights
    )
    pre_d = fused.fused_d

    run_gate2 = not g1.fired or config.gate2_after_gate1_exclusion
    if run_gate2:
        g2 = gate2_evaluate(
            evidences[config.gate2.witness_a].d,
            evidences[config.gate2.witness_b].d,
            pre_d,
            config.gate2,
        )
    else:
        g2 = Gate2Decision(fired=False, corrected_d=pre_d)

    trace = GateTrace(
        gate1_fired=g1.fired,
        gate2_fired=g2.fired,
        agreeing_jury=g1.agreeing_jury,
        pre_correction_d=pre_d,
        post_correction_d=g2.corrected_d,
    )
    prediction = Prediction.from_fused(
        sample_id,
        g2.corrected_d,
        gate1_fired=g1.fired,
        gate2_fired=g2.fired,
        excluded_models=excluded,
    )
    return prediction, trace


def _decide_prob_average(
    sample_id: str,
    outputs: Mapping[ModelId, ModelOutput],
    config: EnsembleConfig,
) -> tuple[Prediction, GateTrace]:
    # Probability averaging has no fused logit for the gates to act on, so
    # the pipeline reduces to the weighted probability mean.  fused_d is
    # back-filled as the logit of the score to keep Prediction consistent.
    score = fuse_prob_average(list(outputs.values()), config.weights)
    clamped = min(max(score, 1e-15), 1.0 - 1e-15)
    fused_d = math.log(clamped) - math.log1p(-clamped)
    prediction = Prediction(
        sample_id=sample_id,
        fused_d=fused_d,
        fake_score=score,
        predicted_label=Label.FAKE if score > SCORE_THRESHOLD else Label.REAL,
    )
    trace = GateTrace(
        gate1_fired=False,
        gate2_fired=False,
        agreeing_jury=frozenset(),
        pre_correction_d=fused_d,
        post_correction_d=fused_d,
    )
    return prediction, trace

"""TTA view merging and the four fusion strategies.

Weighted logit fusion is the production path; equal-weight logit fusion,
probability averaging and majority voting are the ablation baselines.
Fusing in logit space preserves the dynamic range of each branch's
evidence, whereas probabilities saturate: a branch at logit difference 20
and one at -20 average to ~0.5 in probability space but fuse to a decisive
score in logit space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    ConfigurationError,
    FusionStrategy,
    InputError,
    Label,
    ModelId,
    directional_evidence,
    sign,
)


@dataclass(frozen=True)
class ModelOutput:
    """Post-TTA merged logit pair for one model."""

    model_id: ModelId
    logit_real: float
    logit_fake: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.logit_real) and math.isfinite(self.logit_fake)):
            raise InputError(f"non-finite logits for {self.model_id}")

    @property
    def d(self) -> float:
        return directional_evidence(self.logit_real, self.logit_fake)

    @property
    def fake_probability(self) -> float:
        return fake_probability(self.logit_real, self.logit_fake)


@dataclass(frozen=True)
class FusedOutput:
    """Fused logit pair plus the strategy that produced it."""

    z_real: float
    z_fake: float
    strategy: FusionStrategy

    @property
    def fused_d(self) -> float:
        return self.z_fake - self.z_real

    @property
    def fake_score(self) -> float:
        return fake_probability(self.z_real, self.z_fake)


def fake_probability(z_real: float, z_fake: float) -> float:
    """Softmax probability of the fake class over a binary logit pair."""
    m = max(z_real, z_fake)
    e_real = math.exp(z_real - m)
    e_fake = math.exp(z_fake - m)
    return e_fake / (e_real + e_fake)


def tta_merge(
    model_id: ModelId, views: Sequence[tuple[float, float]]
) -> ModelOutput:
    """Average the logit pairs of a model's test-time views component-wise.

    A single view is passed through unchanged; an empty list is an error.
    """
    if not views:
        raise InputError(f"no views supplied for {model_id}")
    n = len(views)
    z_real = math.fsum(v[0] for v in views) / n
    z_fake = math.fsum(v[1] for v in views) / n
    return ModelOutput(model_id, z_real, z_fake)


def _check_weight_cover(
    outputs: Sequence[ModelOutput], weights: Mapping[ModelId, float]
) -> None:
    present = {o.model_id for o in outputs}
    if len(present) != len(outputs):
        raise InputError("duplicate model in fusion outputs")
    if present != set(weights):
        missing = set(weights) - present
        extra = present - set(weights)
        raise ConfigurationError(
            f"weights and outputs cover different models "
            f"(missing={sorted(m.value for m in missing)}, "
            f"extra={sorted(m.value for m in extra)})"
        )


def fuse_weighted_logit(
    outputs: Sequence[ModelOutput], weights: Mapping[ModelId, float]
) -> FusedOutput:
    """Weighted component-wise average of the per-model logit pairs.

    ``weights`` must cover exactly the models present and sum to 1 (the
    caller re-normalizes when gating excludes a model).
    """
    _check_weight_cover(outputs, weights)
    z_real = math.fsum(weights[o.model_id] * o.logit_real for o in outputs)
    z_fake = math.fsum(weights[o.model_id] * o.logit_fake for o in outputs)
    return FusedOutput(z_real, z_fake, FusionStrategy.WEIGHTED_LOGIT)


def fuse_equal_logit(outputs: Sequence[ModelOutput]) -> FusedOutput:
    """Weighted logit fusion with uniform weights over the models present."""
    if not outputs:
        raise InputError("no model outputs to fuse")
    w = 1.0 / len(outputs)
    weights = {o.model_id: w for o in outputs}
    fused = fuse_weighted_logit(outputs, weights)
    return FusedOutput(fused.z_real, fused.z_fake, FusionStrategy.EQUAL_LOGIT)


def fuse_prob_average(
    outputs: Sequence[ModelOutput], weights: Mapping[ModelId, float]
) -> float:
    """Weighted average of the per-model softmax fake probabilities."""
    _check_weight_cover(outputs, weights)
    return math.fsum(weights[o.model_id] * o.fake_probability for o in outputs)


def fuse_majority_vote(outputs: Sequence[ModelOutput]) -> Label:
    """Sign vote over the per-model directional evidence.

    Zero evidence casts no vote; ties (including the no-vote case) predict
    real.  Yields a label only, never a continuous score.
    """
    if not outputs:
        raise InputError("no model outputs to fuse")
    votes = [sign(o.d) for o in outputs]
    n_fake = votes.count(1)
    n_real = votes.count(-1)
    return Label.FAKE if n_fake > n_real else Label.REAL

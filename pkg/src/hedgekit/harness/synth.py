"""Synthetic labeled cohorts that inject the two gated failure patterns.

Each sample gets a ground-truth direction s (+1 fake, -1 real) and every
model emits evidence d = s * base_scale + noise as the logit pair
(-d/2, +d/2).  Two mutually exclusive corruptions are injected at the
configured rates:

* outlier: the high-resolution branch flips to -s * (tau1 + margin),
  confident and alone against the rest — the pattern gate-1 suppresses.
* consensus override: the three staged branches flip to -s * override_scale
  while both witnesses stay correct at s * (tau1 + margin) and
  s * (tau2 + margin) — the pattern gate-2 corrects.

``override_scale`` must keep the wrong-way majority inside the correction
window: large enough that plain fusion errs, small enough that a delta
shift flips the sign.  With the published weights and thresholds that
window is roughly (6.3, 11.4); the default is 10.5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    ConfigurationError,
    EnsembleConfig,
    Label,
    LogitRecord,
    ModelId,
    View,
    default_config,
)
from .records import Cohort, build_cohort

#: Per-sample construction tags, recorded in the ``group`` field.
GROUP_NORMAL = "normal"
GROUP_OUTLIER = "outlier"
GROUP_OVERRIDE = "override"


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the synthetic failure-pattern generator."""

    n_real: int = 100
    n_fake: int = 100
    base_scale: float = 2.0
    noise_std: float = 0.0
    outlier_rate: float = 0.0
    consensus_override_rate: float = 0.0
    override_scale: float = 10.5
    margin: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_real < 1 or self.n_fake < 1:
            raise ConfigurationError("need at least one sample per class")
        for name in ("outlier_rate", "consensus_override_rate"):
            rate = getattr(self, name)
            if not (0.0 <= rate <= 1.0):
                raise ConfigurationError(f"{name} must lie in [0, 1]")
        if self.outlier_rate + self.consensus_override_rate > 1.0:
            raise ConfigurationError("failure-pattern rates must sum to <= 1")
        if self.noise_std < 0 or self.base_scale <= 0:
            raise ConfigurationError("base_scale must be > 0 and noise_std >= 0")


def _records_for_sample(
    sample_id: str,
    label: Label,
    evidences: dict[ModelId, float],
    config: EnsembleConfig,
    group: str,
) -> list[LogitRecord]:
    records = []
    for model, d in evidences.items():
        views = [View.ORIG]
        if model in config.tta_models:
            views.append(View.HFLIP)
        for view in views:
            records.append(
                LogitRecord(
                    sample_id=sample_id,
                    model_id=model,
                    view=view,
                    logit_real=-d / 2.0,
                    logit_fake=d / 2.0,
                    label=label,
                    group=group,
                )
            )
    return records


def synth_cohort(
    spec: SynthSpec, config: EnsembleConfig | None = None
) -> Cohort:
    """Generate a labeled cohort from generator settings; deterministic
    given the seed.

    Gate thresholds for the injected magnitudes come from ``config`` (the
    published defaults when omitted).  Each record's ``group`` field names
    its construction: normal, outlier, or override.
    """
    config = config or default_config()
    tau1, tau2 = config.gate2.tau1, config.gate2.tau2
    rng = np.random.default_rng(spec.seed)

    records: list[LogitRecord] = []
    labels = [Label.REAL] * spec.n_real + [Label.FAKE] * spec.n_fake
    for idx, label in enumerate(labels):
        s = 1.0 if label is Label.FAKE else -1.0
        sample_id = f"synth-{idx:06d}"

        evidences: dict[ModelId, float] = {}
        for m in sorted(config.models, key=lambda m: m.value):
            d = s * spec.base_scale
            if spec.noise_std > 0:
                d += rng.normal(0.0, spec.noise_std)
            evidences[m] = d

        u = rng.random()
        if u < spec.outlier_rate:
            group = GROUP_OUTLIER
            evidences[ModelId.M4] = -s * (tau1 + spec.margin)
        elif u < spec.outlier_rate + spec.consensus_override_rate:
            group = GROUP_OVERRIDE
            for m in (ModelId.M1, ModelId.M2, ModelId.M3):
                evidences[m] = -s * spec.override_scale
            evidences[ModelId.M4] = s * (tau1 + spec.margin)
            evidences[ModelId.M5] = s * (tau2 + spec.margin)
        else:
            group = GROUP_NORMAL

        records.extend(_records_for_sample(sample_id, label, evidences, config, group))

    return build_cohort(records, declared_models=config.models)

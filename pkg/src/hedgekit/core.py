"""Domain types shared by the whole decision layer.

The ensemble works on binary (real, fake) logits emitted by five detector
branches, identified M1..M5.  Everything downstream reduces a logit pair to
its *directional evidence* d = logit_fake - logit_real: positive d supports
the fake class, negative d the real class.  Class index convention is fixed
package-wide: index 0 = real, index 1 = fake.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping


class ConfigurationError(ValueError):
    """A config object or weight map is inconsistent."""


class InputError(ValueError):
    """Caller-supplied data violates an operation's precondition."""


class EvaluationError(ValueError):
    """A metric is undefined on the given cohort (e.g. a class is absent)."""


class DegradationError(RuntimeError):
    """An image degradation step failed (e.g. codec adapter error)."""


class ModelId(str, Enum):
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    M4 = "M4"
    M5 = "M5"


class View(str, Enum):
    ORIG = "orig"
    HFLIP = "hflip"


class Label(str, Enum):
    REAL = "real"
    FAKE = "fake"


ALL_MODELS: tuple[ModelId, ...] = tuple(ModelId)

#: Decision threshold everywhere a fake score is turned into a label.
#: Ties (score exactly 0.5) predict real.
SCORE_THRESHOLD = 0.5


def logistic(x: float) -> float:
    """Numerically stable 1 / (1 + exp(-x))."""
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def sign(x: float) -> int:
    """Strict sign: +1, -1, or 0.  Zero agrees with neither direction."""
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class LogitRecord:
    """One model's raw binary logits for one view of one sample.

    ``perturbation`` tags the degradation variant the underlying image went
    through ("clean", "jpeg_qf90", "resize_0.9", ...); ``group`` is a free
    cohort/bucket tag carried along for analysis.
    """

    sample_id: str
    model_id: ModelId
    view: View = View.ORIG
    logit_real: float = 0.0
    logit_fake: float = 0.0
    label: Label | None = None
    perturbation: str = "clean"
    group: str | None = None

    def __post_init__(self) -> None:
        _require_finite("logit_real", self.logit_real)
        _require_finite("logit_fake", self.logit_fake)

    @property
    def key(self) -> tuple[str, ModelId, View, str]:
        """Uniqueness key within a cohort."""
        return (self.sample_id, self.model_id, self.view, self.perturbation)


def directional_evidence(logit_real: float, logit_fake: float) -> float:
    """Directional evidence of a logit pair: logit_fake - logit_real.

    Positive values support the fake class, negative the real class; the
    magnitude carries the branch's confidence.
    """
    return _require_finite("logit_fake", logit_fake) - _require_finite(
        "logit_real", logit_real
    )


@dataclass(frozen=True)
class BranchEvidence:
    """Directional evidence of one model, after TTA view merging."""

    model_id: ModelId
    d: float
    included: bool = True


@dataclass(frozen=True)
class WeightHierarchy:
    """Three-level ratio tree that yields the per-model ensemble weights.

    Level 1 splits the staged low-resolution branch internally (M1:M2:M3),
    level 2 splits it against the high-resolution branch (M4), and level 3
    splits the resulting same-backbone block against the contrastive-backbone
    branch (M5).  Ratios only need relative magnitudes; each level is
    normalized independently.
    """

    route_a_internal: tuple[float, float, float] = (0.75, 0.15, 0.10)
    route_a_vs_b: tuple[float, float] = (7.0, 3.0)
    dinov3_vs_c: tuple[float, float] = (7.0, 3.0)

    def __post_init__(self) -> None:
        for name, group in (
            ("route_a_internal", self.route_a_internal),
            ("route_a_vs_b", self.route_a_vs_b),
            ("dinov3_vs_c", self.dinov3_vs_c),
        ):
            if any(r < 0 or not math.isfinite(r) for r in group):
                raise ConfigurationError(f"{name} ratios must be finite and >= 0")
            if not any(r > 0 for r in group):
                raise ConfigurationError(f"{name} must have a strictly positive entry")


def _normalize(ratios: tuple[float, ...]) -> tuple[float, ...]:
    total = sum(ratios)
    return tuple(r / total for r in ratios)


def derive_weights(hierarchy: WeightHierarchy) -> dict[ModelId, float]:
    """Resolve a weight hierarchy into per-model weights summing to 1.

    Each level normalizes its ratio group, then shares multiply down the
    tree: M1..M3 get their internal share of the low-res share of the
    same-backbone share; M4 gets the high-res share of the same-backbone
    share; M5 gets the remaining share.
    """
    internal = _normalize(hierarchy.route_a_internal)
    share_a, share_b = _normalize(hierarchy.route_a_vs_b)
    share_ab, share_c = _normalize(hierarchy.dinov3_vs_c)
    return {
        ModelId.M1: internal[0] * share_a * share_ab,
        ModelId.M2: internal[1] * share_a * share_ab,
        ModelId.M3: internal[2] * share_a * share_ab,
        ModelId.M4: share_b * share_ab,
        ModelId.M5: share_c,
    }


@dataclass(frozen=True)
class Gate1Params:
    """Outlier-suppression gate: drop ``outlier_model`` from the fusion when
    at least ``quorum`` jury models agree on a direction it opposes."""

    enabled: bool = True
    outlier_model: ModelId = ModelId.M4
    quorum: int = 3
    jury: frozenset[ModelId] = frozenset(
        {ModelId.M1, ModelId.M2, ModelId.M3, ModelId.M5}
    )

    def __post_init__(self) -> None:
        if self.quorum < 1 or self.quorum > len(self.jury):
            raise ConfigurationError(
                f"quorum {self.quorum} must be in [1, {len(self.jury)}]"
            )
        if self.outlier_model in self.jury:
            raise ConfigurationError("outlier model cannot sit on its own jury")


@dataclass(frozen=True)
class Gate2Params:
    """Consensus-correction gate: when the two structurally distinct
    witnesses confidently agree against the fused logit, shift the fused
    logit by ``delta`` toward them."""

    enabled: bool = True
    tau1: float = 8.0
    tau2: float = 3.0
    delta: float = 2.5
    witness_a: ModelId = ModelId.M4
    witness_b: ModelId = ModelId.M5

    def __post_init__(self) -> None:
        if self.tau1 < 0 or self.tau2 < 0 or self.delta < 0:
            raise ConfigurationError("tau1, tau2 and delta must be >= 0")
        if self.witness_a == self.witness_b:
            raise ConfigurationError("gate-2 witnesses must be distinct models")


class FusionStrategy(str, Enum):
    WEIGHTED_LOGIT = "weighted_logit"
    EQUAL_LOGIT = "equal_logit"
    PROB_AVERAGE = "prob_average"
    MAJORITY_VOTE = "majority_vote"


@dataclass(frozen=True)
class EnsembleConfig:
    """Full ensemble configuration: weights, TTA membership, gates, strategy.

    ``gate2_after_gate1_exclusion`` controls the overlap case where gate-1
    excludes a model and gate-2's predicate also holds: when true (default)
    gate-2 is still evaluated against the re-fused logit.
    """

    weights: Mapping[ModelId, float] = field(
        default_factory=lambda: derive_weights(WeightHierarchy())
    )
    tta_models: frozenset[ModelId] = frozenset({ModelId.M3, ModelId.M4})
    gate1: Gate1Params = Gate1Params()
    gate2: Gate2Params = Gate2Params()
    strategy: FusionStrategy = FusionStrategy.WEIGHTED_LOGIT
    gate2_after_gate1_exclusion: bool = True

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.weights.values()):
            raise ConfigurationError("ensemble weights must be >= 0")
        total = sum(self.weights.values())
        if abs(total - 1.0) > 1e-9:
            raise ConfigurationError(f"ensemble weights sum to {total!r}, expected 1")
        object.__setattr__(self, "weights", dict(self.weights))

    @property
    def models(self) -> frozenset[ModelId]:
        return frozenset(self.weights)


def default_config() -> EnsembleConfig:
    """The published configuration: hierarchical weights, flip TTA on M3/M4,
    both gates enabled with thresholds (8, 3) and correction 2.5."""
    return EnsembleConfig()


@dataclass(frozen=True)
class Prediction:
    """Final fused decision for one sample.

    ``fused_d`` is the scalar fused directional logit after any gate
    corrections; ``fake_score`` is its logistic transform.  The label is
    fake iff the score strictly exceeds 0.5 (ties predict real).
    """

    sample_id: str
    fused_d: float
    fake_score: float
    predicted_label: Label
    gate1_fired: bool = False
    gate2_fired: bool = False
    excluded_models: frozenset[ModelId] = frozenset()

    def __post_init__(self) -> None:
        if abs(self.fake_score - logistic(self.fused_d)) > 1e-12:
            raise ConfigurationError(
                "fake_score is not the logistic transform of fused_d"
            )
        expected = Label.FAKE if self.fake_score > SCORE_THRESHOLD else Label.REAL
        if self.predicted_label is not expected:
            raise ConfigurationError("predicted_label contradicts fake_score")

    @classmethod
    def from_fused(
        cls,
        sample_id: str,
        fused_d: float,
        *,
        gate1_fired: bool = False,
        gate2_fired: bool = False,
        excluded_models: frozenset[ModelId] = frozenset(),
    ) -> "Prediction":
        score = logistic(fused_d)
        label = Label.FAKE if score > SCORE_THRESHOLD else Label.REAL
        return cls(
            sample_id=sample_id,
            fused_d=fused_d,
            fake_score=score,
            predicted_label=label,
            gate1_fired=gate1_fired,
            gate2_fired=gate2_fired,
            excluded_models=excluded_models,
        )

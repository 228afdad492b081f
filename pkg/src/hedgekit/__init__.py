"""hedgekit: heterogeneous ensemble decision layer.

Fuses binary (real, fake) logits from five detector branches in logit
space with hierarchical weights, refines the fused decision with two
sign-based gates (outlier suppression and cross-branch consensus
correction), and ships the evaluation metrics and image-degradation
machinery needed to measure and stress-test the ensemble.
"""

from .core import (
    ALL_MODELS,
    BranchEvidence,
    ConfigurationError,
    DegradationError,
    EnsembleConfig,
    EvaluationError,
    FusionStrategy,
    Gate1Params,
    Gate2Params,
    InputError,
    Label,
    LogitRecord,
    ModelId,
    Prediction,
    View,
    WeightHierarchy,
    default_config,
    derive_weights,
    directional_evidence,
    logistic,
)
from .fusion import (
    FusedOutput,
    ModelOutput,
    fake_probability,
    fuse_equal_logit,
    fuse_majority_vote,
    fuse_prob_average,
    fuse_weighted_logit,
    tta_merge,
)
from .gating import (
    GateTrace,
    decide,
    decide_traced,
    gate1_evaluate,
    gate2_evaluate,
    renormalize_weights,
)
from .metrics import (
    LabeledScore,
    MetricReport,
    auc,
    balanced_accuracy,
    compute_report,
    f1,
    focal_loss,
    focal_loss_grad,
    jpeg_robustness,
    resize_robustness,
    robustness_metric,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_MODELS",
    "BranchEvidence",
    "ConfigurationError",
    "DegradationError",
    "EnsembleConfig",
    "EvaluationError",
    "FusedOutput",
    "FusionStrategy",
    "Gate1Params",
    "Gate2Params",
    "GateTrace",
    "InputError",
    "Label",
    "LabeledScore",
    "LogitRecord",
    "MetricReport",
    "ModelId",
    "ModelOutput",
    "Prediction",
    "View",
    "WeightHierarchy",
    "auc",
    "balanced_accuracy",
    "compute_report",
    "decide",
    "decide_traced",
    "default_config",
    "derive_weights",
    "directional_evidence",
    "f1",
    "fake_probability",
    "focal_loss",
    "focal_loss_grad",
    "fuse_equal_logit",
    "fuse_majority_vote",
    "fuse_prob_average",
    "fuse_weighted_logit",
    "gate1_evaluate",
    "gate2_evaluate",
    "jpeg_robustness",
    "logistic",
    "renormalize_weights",
    "resize_robustness",
    "robustness_metric",
    "tta_merge",
]

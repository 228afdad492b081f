"""Ingestion, configuration, runners, synthetic cohorts, and reports."""

from .config import config_from_dict, config_to_dict, load_config, save_config
from .records import Cohort, build_cohort, load_cohort, save_cohort
from .report import (
    write_ablation_csv,
    write_ablation_markdown,
    write_manifest,
    write_metric_report_csv,
    write_metric_report_markdown,
    write_predictions,
    write_sweep_csv,
    write_sweep_markdown,
)
from .run import (
    ABLATION_CONFIGURATIONS,
    AblationRow,
    SamplePrediction,
    labeled_scores,
    run_ablation,
    run_ensemble,
    sweep_cohort,
)
from .synth import GROUP_NORMAL, GROUP_OUTLIER, GROUP_OVERRIDE, SynthSpec, synth_cohort

__all__ = [
    "ABLATION_CONFIGURATIONS",
    "AblationRow",
    "Cohort",
    "GROUP_NORMAL",
    "GROUP_OUTLIER",
    "GROUP_OVERRIDE",
    "SamplePrediction",
    "SynthSpec",
    "build_cohort",
    "config_from_dict",
    "config_to_dict",
    "labeled_scores",
    "load_cohort",
    "load_config",
    "run_ablation",
    "run_ensemble",
    "save_cohort",
    "save_config",
    "sweep_cohort",
    "synth_cohort",
    "write_ablation_csv",
    "write_ablation_markdown",
    "write_manifest",
    "write_metric_report_csv",
    "write_metric_report_markdown",
    "write_predictions",
    "write_sweep_csv",
    "write_sweep_markdown",
]

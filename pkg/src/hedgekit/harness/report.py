"""Report emission: CSV (RFC-4180 via the csv module) and markdown tables.

Column order is fixed and numeric cells are formatted to four decimals so
reports are byte-stable and diff-friendly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

from ..distort import AppliedStep
from ..metrics import MetricReport
from .run import AblationRow, SamplePrediction

METRIC_COLUMNS = ("subset", "n_real", "n_fake", "b_acc", "r_acc", "f_acc", "f1", "auc")
ABLATION_COLUMNS = (
    "configuration",
    "clean_auc",
    "clean_f1",
    "clean_b_acc",
    "robust_auc",
    "robust_f1",
    "robust_b_acc",
)
SWEEP_COLUMNS = ("intensity", "b_acc")
PREDICTION_COLUMNS = (
    "sample_id",
    "perturbation",
    "fused_d",
    "fake_score",
    "predicted_label",
    "gate1_fired",
    "gate2_fired",
    "excluded_models",
    "label",
)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def _metric_rows(report: MetricReport) -> list[list[str]]:
    rows = [
        [
            "overall",
            str(report.n_real),
            str(report.n_fake),
            _fmt(report.b_acc),
            _fmt(report.r_acc),
            _fmt(report.f_acc),
            _fmt(report.f1),
            _fmt(report.auc),
        ]
    ]
    for tag, sub in sorted(report.per_perturbation.items()):
        rows.append(
            [
                tag,
                str(sub.n_real),
                str(sub.n_fake),
                _fmt(sub.b_acc),
                _fmt(sub.r_acc),
                _fmt(sub.f_acc),
                _fmt(sub.f1),
                _fmt(sub.auc),
            ]
        )
    return rows


def _ablation_rows(table: Sequence[AblationRow]) -> list[list[str]]:
    return [
        [
            row.configuration,
            _fmt(row.clean_auc),
            _fmt(row.clean_f1),
            _fmt(row.clean_b_acc),
            _fmt(row.robust_auc),
            _fmt(row.robust_f1),
            _fmt(row.robust_b_acc),
        ]
        for row in table
    ]


def _sweep_rows(points: Sequence[tuple[float, float]]) -> list[list[str]]:
    return [[f"{intensity:g}", _fmt(b_acc)] for intensity, b_acc in points]


def _write_csv(path: str | Path, header: Sequence[str], rows: list[list[str]]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_markdown(
    path: str | Path, header: Sequence[str], rows: list[list[str]]
) -> None:
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_metric_report_csv(report: MetricReport, path: str | Path) -> None:
    _write_csv(path, METRIC_COLUMNS, _metric_rows(report))


def write_metric_report_markdown(report: MetricReport, path: str | Path) -> None:
    _write_markdown(path, METRIC_COLUMNS, _metric_rows(report))


def write_ablation_csv(table: Sequence[AblationRow], path: str | Path) -> None:
    _write_csv(path, ABLATION_COLUMNS, _ablation_rows(table))


def write_ablation_markdown(table: Sequence[AblationRow], path: str | Path) -> None:
    _write_markdown(path, ABLATION_COLUMNS, _ablation_rows(table))


def write_sweep_csv(points: Sequence[tuple[float, float]], path: str | Path) -> None:
    _write_csv(path, SWEEP_COLUMNS, _sweep_rows(points))


def write_sweep_markdown(points: Sequence[tuple[float, float]], path: str | Path) -> None:
    _write_markdown(path, SWEEP_COLUMNS, _sweep_rows(points))


def write_predictions(results: Sequence[SamplePrediction], path: str | Path) -> None:
    """Write predictions as line-delimited JSON (full float precision)."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for res in results:
            p = res.prediction
            obj = {
                "sample_id": p.sample_id,
                "perturbation": res.perturbation,
                "fused_d": p.fused_d,
                "fake_score": p.fake_score,
                "predicted_label": p.predicted_label.value,
                "gate1_fired": p.gate1_fired,
                "gate2_fired": p.gate2_fired,
                "excluded_models": sorted(m.value for m in p.excluded_models),
            }
            if res.label is not None:
                obj["label"] = res.label.value
            if res.group is not None:
                obj["group"] = res.group
            fh.write(json.dumps(obj) + "\n")


def write_manifest(steps: Sequence[AppliedStep], path: str | Path, image: str | None = None) -> None:
    """Append applied degradation steps to a JSONL manifest."""
    with Path(path).open("a", encoding="utf-8") as fh:
        for step in steps:
            obj = {
                "hop": step.hop,
                "group": step.group.value,
                "severity": step.severity,
                "params": step.params,
            }
            if image is not None:
                obj["image"] = image
            fh.write(json.dumps(obj) + "\n")

"""Line-delimited logit record ingestion and validation.

The on-disk format is one JSON object per line with named fields::

    {"sample_id": "img-001", "model_id": "M1", "view": "orig",
     "logit_real": 1.25, "logit_fake": -0.4,
     "label": "fake", "perturbation": "clean", "group": "wild"}

``label``, ``perturbation`` (default "clean") and ``group`` are optional;
unknown fields are ignored with a warning.  Strict loading (the default)
fails when any sample is missing a declared model; lenient loading drops
such samples and reports them.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..core import InputError, Label, LogitRecord, ModelId, View

_KNOWN_FIELDS = {
    "sample_id",
    "model_id",
    "view",
    "logit_real",
    "logit_fake",
    "label",
    "perturbation",
    "group",
}


@dataclass(frozen=True)
class Cohort:
    """Validated set of logit records covering every declared model."""

    records: tuple[LogitRecord, ...]
    models: frozenset[ModelId]
    dropped_samples: tuple[str, ...] = ()
    index: Mapping[tuple[str, ModelId, View, str], LogitRecord] = field(
        default_factory=dict, repr=False
    )

    @property
    def sample_keys(self) -> list[tuple[str, str]]:
        """Distinct (sample_id, perturbation) pairs, sorted."""
        return sorted({(r.sample_id, r.perturbation) for r in self.records})

    @property
    def perturbations(self) -> list[str]:
        return sorted({r.perturbation for r in self.records})

    def sample_records(self, sample_id: str, perturbation: str) -> list[LogitRecord]:
        return [
            r
            for r in self.records
            if r.sample_id == sample_id and r.perturbation == perturbation
        ]

    def labels(self) -> dict[str, Label]:
        """Ground-truth label per sample_id (samples without labels omitted)."""
        return {
            r.sample_id: r.label for r in self.records if r.label is not None
        }


def build_cohort(
    records: Iterable[LogitRecord],
    declared_models: Iterable[ModelId] | None = None,
    strict: bool = True,
) -> Cohort:
    """Index and validate records into a cohort.

    Checks key uniqueness, per-sample label consistency, and completeness
    of every (sample, perturbation) against the declared model set.  In
    lenient mode incomplete samples are dropped with a warning instead of
    failing.
    """
    records = list(records)
    if not records:
        raise InputError("empty cohort")
    models = (
        frozenset(declared_models)
        if declared_models is not None
        else frozenset(r.model_id for r in records)
    )

    index: dict[tuple[str, ModelId, View, str], LogitRecord] = {}
    for rec in records:
        if rec.key in index:
            raise InputError(f"duplicate record key {rec.key}")
        index[rec.key] = rec

    labels: dict[str, Label] = {}
    for rec in records:
        if rec.label is None:
            continue
        seen = labels.setdefault(rec.sample_id, rec.label)
        if seen is not rec.label:
            raise InputError(f"conflicting labels for sample {rec.sample_id!r}")

    incomplete: set[str] = set()
    problems: list[str] = []
    by_key: dict[tuple[str, str], set[ModelId]] = {}
    for rec in records:
        by_key.setdefault((rec.sample_id, rec.perturbation), set()).add(rec.model_id)
    for (sample_id, tag), present in sorted(by_key.items()):
        missing = models - present
        if missing:
            incomplete.add(sample_id)
            problems.append(
                f"{sample_id} ({tag}): missing {sorted(m.value for m in missing)}"
            )
    if incomplete and strict:
        raise InputError(
            "incomplete samples:\n  " + "\n  ".join(problems)
        )
    if incomplete:
        warnings.warn(
            f"dropped {len(incomplete)} incomplete sample(s): "
            f"{sorted(incomplete)}",
            stacklevel=2,
        )
        records = [r for r in records if r.sample_id not in incomplete]
        if not records:
            raise InputError("all samples incomplete after lenient validation")
        index = {r.key: r for r in records}

    return Cohort(
        records=tuple(records),
        models=models,
        dropped_samples=tuple(sorted(incomplete)),
        index=index,
    )


def _parse_record(obj: dict, line_no: int) -> LogitRecord:
    unknown = set(obj) - _KNOWN_FIELDS
    if unknown:
        warnings.warn(
            f"line {line_no}: ignoring unknown fields {sorted(unknown)}",
            stacklevel=3,
        )
    try:
        return LogitRecord(
            sample_id=str(obj["sample_id"]),
            model_id=ModelId(obj["model_id"]),
            view=View(obj.get("view", "orig")),
            logit_real=float(obj["logit_real"]),
            logit_fake=float(obj["logit_fake"]),
            label=Label(obj["label"]) if obj.get("label") is not None else None,
            perturbation=str(obj.get("perturbation") or "clean"),
            group=obj.get("group"),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"line {line_no}: malformed record: {exc}") from exc


def load_cohort(
    path: str | Path,
    declared_models: Iterable[ModelId] | None = None,
    strict: bool = True,
) -> Cohort:
    """Load and validate a line-delimited cohort file."""
    path = Path(path)
    records: list[LogitRecord] = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"line {line_no}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise InputError(f"line {line_no}: record must be a JSON object")
            records.append(_parse_record(obj, line_no))
    if not records:
        raise InputError("empty cohort")
    return build_cohort(records, declared_models=declared_models, strict=strict)


def record_to_dict(rec: LogitRecord) -> dict:
    obj = {
        "sample_id": rec.sample_id,
        "model_id": rec.model_id.value,
        "view": rec.view.value,
        "logit_real": rec.logit_real,
        "logit_fake": rec.logit_fake,
    }
    if rec.label is not None:
        obj["label"] = rec.label.value
    if rec.perturbation != "clean":
        obj["perturbation"] = rec.perturbation
    if rec.group is not None:
        obj["group"] = rec.group
    return obj


def save_cohort(records: Sequence[LogitRecord] | Cohort, path: str | Path) -> None:
    """Write records as line-delimited JSON."""
    if isinstance(records, Cohort):
        records = records.records
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec)) + "\n")

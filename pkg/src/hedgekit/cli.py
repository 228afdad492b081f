"""Command-line interface.

Subcommands: fuse, evaluate, ablate, distort, sweep, synth.  Exit codes:
0 on success, 1 on validation/configuration errors, 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import distort as distort_mod
from .core import (
    ConfigurationError,
    EnsembleConfig,
    EvaluationError,
    FusionStrategy,
    InputError,
    Label,
    default_config,
)
from .harness import (
    SynthSpec,
    load_cohort,
    load_config,
    run_ablation,
    run_ensemble,
    save_cohort,
    sweep_cohort,
    synth_cohort,
    write_ablation_csv,
    write_ablation_markdown,
    write_manifest,
    write_metric_report_csv,
    write_metric_report_markdown,
    write_predictions,
    write_sweep_csv,
    write_sweep_markdown,
)
from .metrics import LabeledScore, compute_report
from .pixelio import read_image, write_png

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".webp"}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="ensemble config JSON")
    parser.add_argument(
        "--strategy",
        choices=[s.value for s in FusionStrategy],
        help="override the fusion strategy",
    )
    parser.add_argument("--no-gate1", action="store_true", help="disable gate-1")
    parser.add_argument("--no-gate2", action="store_true", help="disable gate-2")
    parser.add_argument("--tau1", type=float, help="override gate-2 tau1")
    parser.add_argument("--tau2", type=float, help="override gate-2 tau2")
    parser.add_argument("--delta", type=float, help="override gate-2 delta")
    parser.add_argument("--quorum", type=int, help="override gate-1 quorum")


def _resolve_config(args: argparse.Namespace) -> EnsembleConfig:
    config = load_config(args.config) if args.config else default_config()
    if args.strategy:
        config = dataclasses.replace(config, strategy=FusionStrategy(args.strategy))
    gate1 = config.gate1
    if args.no_gate1:
        gate1 = dataclasses.replace(gate1, enabled=False)
    if args.quorum is not None:
        gate1 = dataclasses.replace(gate1, quorum=args.quorum)
    gate2 = config.gate2
    if args.no_gate2:
        gate2 = dataclasses.replace(gate2, enabled=False)
    for name in ("tau1", "tau2", "delta"):
        value = getattr(args, name)
        if value is not None:
            gate2 = dataclasses.replace(gate2, **{name: value})
    return dataclasses.replace(config, gate1=gate1, gate2=gate2)


def _cmd_fuse(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    cohort = load_cohort(args.cohort, strict=not args.lenient)
    results = run_ensemble(cohort, config)
    write_predictions(results, args.out)
    print(f"wrote {len(results)} predictions to {args.out}")
    return EXIT_OK


def _load_prediction_rows(path: Path) -> list[LabeledScore]:
    rows: list[LabeledScore] = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"line {line_no}: invalid JSON: {exc}") from exc
            if obj.get("label") is None:
                raise EvaluationError(
                    f"line {line_no}: prediction has no ground-truth label"
                )
            try:
                rows.append(
                    LabeledScore(
                        sample_id=str(obj["sample_id"]),
                        fake_score=float(obj["fake_score"]),
                        label=Label(obj["label"]),
                        perturbation=str(obj.get("perturbation", "clean")),
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                if isinstance(exc, (InputError, EvaluationError)):
                    raise
                raise InputError(f"line {line_no}: malformed prediction: {exc}") from exc
    if not rows:
        raise InputError("empty predictions file")
    return rows


def _cmd_evaluate(args: argparse.Namespace) -> int:
    rows = _load_prediction_rows(args.predictions)
    report = compute_report(rows, threshold=args.threshold)
    if args.format == "csv":
        write_metric_report_csv(report, args.out)
    else:
        write_metric_report_markdown(report, args.out)
    print(
        f"b_acc={report.b_acc:.4f} r_acc={report.r_acc:.4f} "
        f"f_acc={report.f_acc:.4f} f1={report.f1:.4f} auc={report.auc:.4f}"
    )
    print(f"wrote report to {args.out}")
    return EXIT_OK


def _cmd_ablate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    cohort = load_cohort(args.cohort, strict=not args.lenient)
    table = run_ablation(cohort, config, clean_tag=args.clean_tag)
    if args.format == "csv":
        write_ablation_csv(table, args.out)
    else:
        write_ablation_markdown(table, args.out)
    print(f"wrote {len(table)} ablation rows to {args.out}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    cohort = load_cohort(args.cohort, strict=not args.lenient)
    points = sweep_cohort(cohort, config, args.kind)
    if args.format == "csv":
        write_sweep_csv(points, args.out)
    else:
        write_sweep_markdown(points, args.out)
    print(f"wrote {len(points)} sweep points to {args.out}")
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = SynthSpec(
        n_real=args.n_real,
        n_fake=args.n_fake,
        base_scale=args.scale,
        noise_std=args.noise,
        outlier_rate=args.outlier_rate,
        consensus_override_rate=args.override_rate,
        override_scale=args.override_scale,
        seed=args.seed,
    )
    cohort = synth_cohort(spec)
    save_cohort(cohort, args.out)
    print(f"wrote {len(cohort.records)} records to {args.out}")
    return EXIT_OK


def _cmd_distort(args: argparse.Namespace) -> int:
    in_dir: Path = args.input
    out_dir: Path = args.output
    if not in_dir.is_dir():
        raise InputError(f"input directory {in_dir} does not exist")
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.jsonl"
    manifest_path.unlink(missing_ok=True)

    params = distort_mod.AugParams(
        max_distortions=args.max_distortions,
        num_levels=args.num_levels,
        aug_prob=args.aug_prob,
    )
    rng = np.random.default_rng(args.seed)
    images = sorted(
        p for p in in_dir.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES
    )
    if not images:
        raise InputError(f"no images found in {in_dir}")

    degraded = 0
    for path in images:
        buf = read_image(path)
        if args.chain_hops:
            buf, steps = distort_mod.chain_degrade(
                buf, args.chain_hops, rng, params=params
            )
        else:
            plan = distort_mod.sample_plan(params, rng)
            steps = []
            if plan is not None:
                buf, steps = distort_mod.apply_plan(buf, plan)
        out_path = out_dir / (path.stem + ".png")
        write_png(buf, out_path)
        write_manifest(steps, manifest_path, image=path.name)
        degraded += 1 if steps else 0
    print(
        f"processed {len(images)} images ({degraded} degraded) into {out_dir}; "
        f"manifest at {manifest_path}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedgekit",
        description="Heterogeneous ensemble decision layer tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="cohort + config -> predictions")
    p.add_argument("--cohort", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--lenient", action="store_true", help="drop incomplete samples")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("evaluate", help="labeled predictions -> metric report")
    p.add_argument("--predictions", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("ablate", help="fusion-strategy and gating ablation table")
    p.add_argument("--cohort", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--clean-tag", default="clean")
    p.add_argument("--lenient", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("sweep", help="per-intensity balanced accuracy curve")
    p.add_argument("--cohort", type=Path, required=True)
    p.add_argument("--kind", choices=("jpeg", "resize", "blur"), required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--lenient", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("synth", help="generate a synthetic labeled cohort")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--n-real", type=int, default=100)
    p.add_argument("--n-fake", type=int, default=100)
    p.add_argument("--scale", type=float, default=2.0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--outlier-rate", type=float, default=0.0)
    p.add_argument("--override-rate", type=float, default=0.0)
    p.add_argument("--override-scale", type=float, default=10.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("distort", help="degrade an image directory")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--max-distortions", type=int, default=3)
    p.add_argument("--num-levels", type=int, default=3)
    p.add_argument("--aug-prob", type=float, default=1.0)
    p.add_argument("--chain-hops", type=int, default=0, help="multi-hop mode")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_distort)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ConfigurationError, EvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

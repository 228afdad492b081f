# End-to-end CLI workflow in a temporary directory:
# synth -> fuse -> evaluate -> ablate, all through the console entry point.

import tempfile
from pathlib import Path

from hedgekit.cli import main

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    cohort = tmp / "cohort.jsonl"
    preds = tmp / "predictions.jsonl"
    report = tmp / "report.csv"
    ablation = tmp / "ablation.md"

    print("== synth ==")
    main([
        "synth", "--out", str(cohort),
        "--n-real", "200", "--n-fake", "200",
        "--outlier-rate", "0.1", "--override-rate", "0.1",
        "--seed", "7",
    ])

    print("== fuse (full configuration) ==")
    main(["fuse", "--cohort", str(cohort), "--out", str(preds)])

    print("== evaluate ==")
    main(["evaluate", "--predictions", str(preds), "--out", str(report)])
    print(report.read_text())

    # The synth cohort is all-clean; tag a copy as perturbed so the
    # ablation has a robust column to chew on. Real use feeds a cohort
    # whose records carry genuine perturbation tags.
    lines = cohort.read_text().splitlines()
    tagged = [
        line.rstrip()[:-1] + ', "perturbation": "jpeg_qf90"}' for line in lines
    ]
    mixed = tmp / "mixed.jsonl"
    mixed.write_text("\n".join(lines + tagged) + "\n")

    print("== ablate ==")
    main(["ablate", "--cohort", str(mixed), "--out", str(ablation), "--format", "markdown"])
    print(ablation.read_text())

import csv
import json

import numpy as np
import pytest

from hedgekit.cli import main
from hedgekit.core import Label, LogitRecord, ModelId, View
from hedgekit.distort import INTENSITY_GRIDS, PixelBuffer, perturbation_tag
from hedgekit.harness import save_cohort
from hedgekit.pixelio import default_jpeg_codec, write_png


def make_cohort(path, n=8, tags=("clean",)):
    records = []
    for i in range(n):
        label = Label.FAKE if i % 2 else Label.REAL
        s = 1.0 if label is Label.FAKE else -1.0
        for tag in tags:
            for m in ModelId:
                views = (
                    [View.ORIG, View.HFLIP]
                    if m in (ModelId.M3, ModelId.M4)
                    else [View.ORIG]
                )
                for view in views:
                    records.append(
                        LogitRecord(
                            sample_id=f"s{i}",
                            model_id=m,
                            view=view,
                            logit_real=-s,
                            logit_fake=s,
                            label=label,
                            perturbation=tag,
                        )
                    )
    save_cohort(records, path)
    return path


class TestFuseEvaluate:
    def test_fuse_then_evaluate(self, tmp_path, capsys):
        cohort = make_cohort(tmp_path / "cohort.jsonl")
        preds = tmp_path / "preds.jsonl"
        assert main(["fuse", "--cohort", str(cohort), "--out", str(preds)]) == 0
        lines = [json.loads(l) for l in preds.read_text().splitlines()]
        assert len(lines) == 8
        assert all("fake_score" in obj and "label" in obj for obj in lines)

        report = tmp_path / "report.csv"
        assert (
            main(["evaluate", "--predictions", str(preds), "--out", str(report)])
            == 0
        )
        with report.open() as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["subset"] == "overall"
        assert rows[0]["b_acc"] == "1.0000"

    def test_fuse_validation_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("")
        out = tmp_path / "preds.jsonl"
        assert main(["fuse", "--cohort", str(bad), "--out", str(out)]) == 1

    def test_fuse_missing_file_is_io_error(self, tmp_path):
        out = tmp_path / "preds.jsonl"
        code = main(
            ["fuse", "--cohort", str(tmp_path / "nope.jsonl"), "--out", str(out)]
        )
        assert code == 2

    def test_evaluate_unlabeled_predictions_rejected(self, tmp_path):
        preds = tmp_path / "p.jsonl"
        preds.write_text(json.dumps({"sample_id": "a", "fake_score": 0.9}) + "\n")
        assert (
            main(
                [
                    "evaluate",
                    "--predictions",
                    str(preds),
                    "--out",
                    str(tmp_path / "r.csv"),
                ]
            )
            == 1
        )


class TestAblateSweepSynth:
    def test_ablate_writes_all_rows(self, tmp_path):
        cohort = make_cohort(
            tmp_path / "cohort.jsonl", tags=("clean", "jpeg_qf90")
        )
        out = tmp_path / "ablation.csv"
        assert main(["ablate", "--cohort", str(cohort), "--out", str(out)]) == 0
        with out.open() as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 7
        majority = rows[0]
        assert majority["configuration"] == "majority_vote"
        assert majority["clean_auc"] == ""

    def test_sweep_rows_match_grid(self, tmp_path):
        tags = [perturbation_tag("blur", i) for i in INTENSITY_GRIDS["blur"]]
        cohort = make_cohort(tmp_path / "cohort.jsonl", tags=tuple(tags))
        out = tmp_path / "sweep.csv"
        assert (
            main(
                [
                    "sweep",
                    "--cohort",
                    str(cohort),
                    "--kind",
                    "blur",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        with out.open() as fh:
            rows = list(csv.DictReader(fh))
        assert [r["intensity"] for r in rows] == [
            f"{i:g}" for i in INTENSITY_GRIDS["blur"]
        ]

    def test_synth_output_loads_and_fuses(self, tmp_path):
        cohort = tmp_path / "synth.jsonl"
        assert (
            main(
                [
                    "synth",
                    "--out",
                    str(cohort),
                    "--n-real",
                    "5",
                    "--n-fake",
                    "5",
                    "--outlier-rate",
                    "0.5",
                    "--seed",
                    "3",
                ]
            )
            == 0
        )
        preds = tmp_path / "preds.jsonl"
        assert main(["fuse", "--cohort", str(cohort), "--out", str(preds)]) == 0
        assert len(preds.read_text().splitlines()) == 10

    def test_config_overrides(self, tmp_path):
        cohort = make_cohort(tmp_path / "cohort.jsonl")
        preds = tmp_path / "preds.jsonl"
        code = main(
            [
                "fuse",
                "--cohort",
                str(cohort),
                "--out",
                str(preds),
                "--no-gate1",
                "--no-gate2",
                "--strategy",
                "equal_logit",
            ]
        )
        assert code == 0

    def test_cli_flags_override_config_file(self, tmp_path):
        import dataclasses

        from hedgekit.cli import _resolve_config, build_parser
        from hedgekit.core import Gate2Params, default_config
        from hedgekit.harness import save_config

        cfg_path = tmp_path / "cfg.json"
        save_config(
            dataclasses.replace(default_config(), gate2=Gate2Params(tau1=9.0)),
            cfg_path,
        )
        args = build_parser().parse_args(
            [
                "fuse",
                "--cohort",
                "x",
                "--out",
                "y",
                "--config",
                str(cfg_path),
                "--tau1",
                "6.5",
                "--no-gate1",
            ]
        )
        resolved = _resolve_config(args)
        assert resolved.gate2.tau1 == 6.5  # flag wins over file
        assert not resolved.gate1.enabled
        assert resolved.gate2.tau2 == 3.0  # untouched default preserved

    def test_end_to_end_reports_byte_identical(self, tmp_path):
        cohort = tmp_path / "cohort.jsonl"
        outputs = []
        for run in ("a", "b"):
            main(
                [
                    "synth",
                    "--out",
                    str(cohort),
                    "--n-real",
                    "30",
                    "--n-fake",
                    "30",
                    "--outlier-rate",
                    "0.2",
                    "--noise",
                    "0.4",
                    "--seed",
                    "11",
                ]
            )
            preds = tmp_path / f"preds-{run}.jsonl"
            report = tmp_path / f"report-{run}.csv"
            main(["fuse", "--cohort", str(cohort), "--out", str(preds)])
            main(["evaluate", "--predictions", str(preds), "--out", str(report)])
            outputs.append((preds.read_bytes(), report.read_bytes()))
        assert outputs[0] == outputs[1]


@pytest.mark.skipif(
    default_jpeg_codec() is None, reason="no JPEG codec adapter configured"
)
class TestDistortCommand:
    def test_degrades_directory_with_manifest(self, tmp_path):
        in_dir = tmp_path / "in"
        in_dir.mkdir()
        rng = np.random.default_rng(0)
        for i in range(3):
            write_png(PixelBuffer(rng.random((24, 24, 3))), in_dir / f"img{i}.png")
        out_dir = tmp_path / "out"
        code = main(
            [
                "distort",
                "--input",
                str(in_dir),
                "--output",
                str(out_dir),
                "--seed",
                "7",
            ]
        )
        assert code == 0
        assert sorted(p.name for p in out_dir.glob("*.png")) == [
            "img0.png",
            "img1.png",
            "img2.png",
        ]
        manifest = [
            json.loads(l)
            for l in (out_dir / "manifest.jsonl").read_text().splitlines()
        ]
        assert all("group" in m and "severity" in m for m in manifest)

    def test_chain_mode_forces_jpeg_per_hop(self, tmp_path):
        in_dir = tmp_path / "in"
        in_dir.mkdir()
        write_png(PixelBuffer.full(16, 16, 0.5), in_dir / "img.png")
        out_dir = tmp_path / "out"
        code = main(
            [
                "distort",
                "--input",
                str(in_dir),
                "--output",
                str(out_dir),
                "--chain-hops",
                "2",
                "--seed",
                "1",
            ]
        )
        assert code == 0
        manifest = [
            json.loads(l)
            for l in (out_dir / "manifest.jsonl").read_text().splitlines()
        ]
        for hop in (1, 2):
            assert any(
                m["hop"] == hop and m["group"] == "jpeg" for m in manifest
            )

    def test_empty_input_dir_rejected(self, tmp_path):
        in_dir = tmp_path / "in"
        in_dir.mkdir()
        code = main(
            ["distort", "--input", str(in_dir), "--output", str(tmp_path / "o")]
        )
        assert code == 1

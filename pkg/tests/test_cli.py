import json

import pytest

from gladpred.cli import main

from test_service import fixed_bundle  # noqa: F401 - fixture reuse
from gladpred.modelstore import save_bundle


def run(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def synth_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "cohort.csv"
    assert run("synth", "--n", "400", "--seed", "7", "--r2", "0.32", "--out", str(path)) == 0
    return path


class TestSynth:
    def test_row_count(self, synth_csv):
        assert sum(1 for _ in open(synth_csv)) == 401  # header + rows

    def test_manifest_written(self, synth_csv):
        manifest = json.loads((synth_csv.parent / "cohort.csv.manifest.json").read_text())
        assert manifest["command"] == "synth"
        assert manifest["params"]["n"] == 400
        assert "synthetic_config" in manifest["params"]

    def test_byte_identical_reruns(self, tmp_path, synth_csv):
        again = tmp_path / "again.csv"
        assert run("synth", "--n", "400", "--seed", "7", "--r2", "0.32", "--out", str(again)) == 0
        assert again.read_bytes() == synth_csv.read_bytes()

    def test_zero_n_usage_error(self, tmp_path):
        assert run("synth", "--n", "0", "--out", str(tmp_path / "x.csv")) == 2

    def test_unknown_flag_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run("synth", "--n", "10", "--frobnicate", "--out", str(tmp_path / "x.csv"))
        assert err.value.code == 2


@pytest.fixture(scope="module")
def eval_dir(synth_csv, tmp_path_factory):
    out = tmp_path_factory.mktemp("eval") / "run1"
    code = run(
        "evaluate", "--data", str(synth_csv), "--variants", "full,topk:3,concise",
        "--folds", "3", "--trees", "6", "--margins", "5,10,15,20", "--out", str(out),
    )
    assert code == 0
    return out


class TestEvaluate:
    def test_artifacts_exist(self, eval_dir):
        names = {p.name for p in eval_dir.iterdir()}
        assert {"report.json", "report.csv", "margin_sweep.csv", "exclusions.json", "importance.csv", "manifest.json"} <= names

    def test_report_shape(self, eval_dir):
        report = json.loads((eval_dir / "report.json").read_text())
        assert [r["variant"] for r in report["reports"]] == ["full", "topk:3", "concise"]
        assert len(report["reports"][0]["per_fold"]) == 3
        rows = report["comparison"]["rows"]
        assert {row["variant"] for row in rows} == {"full", "topk:3", "concise"}
        avg = {row["rho_average"] for row in rows}
        assert len(avg) == 1  # same average model regardless of variant

    def test_report_csv_header(self, eval_dir):
        header = (eval_dir / "report.csv").read_text().splitlines()[0]
        assert header == "variant,mean_rmse,mean_r2,margin,rho_personalized,rho_average"

    def test_margin_sweep_rows(self, eval_dir):
        lines = (eval_dir / "margin_sweep.csv").read_text().splitlines()
        assert lines[0] == "margin,rho_personalized,rho_average"
        assert len(lines) == 5

    def test_exclusions_conserve(self, eval_dir):
        exclusions = json.loads((eval_dir / "exclusions.json").read_text())
        total = exclusions["included"] + sum(e["count"] for e in exclusions["excluded"])
        assert total == exclusions["total_in"] == 400

    def test_determinism_and_thread_invariance(self, synth_csv, eval_dir, tmp_path):
        out = tmp_path / "run2"
        code = run(
            "evaluate", "--data", str(synth_csv), "--variants", "full,topk:3,concise",
            "--folds", "3", "--trees", "6", "--margins", "5,10,15,20", "--jobs", "3", "--out", str(out),
        )
        assert code == 0
        for name in ("report.json", "report.csv", "margin_sweep.csv", "importance.csv", "exclusions.json"):
            assert (out / name).read_bytes() == (eval_dir / name).read_bytes(), name

    def test_folds_1_usage_error(self, synth_csv, tmp_path):
        assert run("evaluate", "--data", str(synth_csv), "--folds", "1", "--out", str(tmp_path / "x")) == 2

    def test_missing_data_usage_error(self, tmp_path):
        assert run("evaluate", "--data", str(tmp_path / "ghost.csv"), "--out", str(tmp_path / "x")) == 2


class TestImportance:
    def test_outputs(self, synth_csv, tmp_path):
        out = tmp_path / "imp"
        code = run("importance", "--data", str(synth_csv), "--folds", "3", "--trees", "6", "--out", str(out))
        assert code == 0
        lines = (out / "importance.csv").read_text().splitlines()
        assert lines[0] == "rank,variable_id,importance"
        assert len(lines) == 35
        assert lines[1].split(",")[1] == "baseline_pain"  # dominant signal ranks first
        elbow = json.loads((out / "elbow.json").read_text())
        assert 1 <= elbow["suggested_k"] <= 34

    def test_full_data_mode(self, synth_csv, tmp_path):
        out = tmp_path / "imp_full"
        assert run("importance", "--data", str(synth_csv), "--mode", "full", "--trees", "6", "--out", str(out)) == 0
        assert (out / "importance.csv").exists()


@pytest.fixture(scope="module")
def bundle_path(synth_csv, tmp_path_factory):
    out = tmp_path_factory.mktemp("models") / "m.glad-model.json"
    code = run(
        "train", "--data", str(synth_csv), "--variant", "concise",
        "--folds", "3", "--trees", "6", "--out", str(out),
    )
    assert code == 0
    return out


class TestTrain:
    def test_bundle_contents(self, bundle_path):
        from gladpred.modelstore import load_bundle

        bundle = load_bundle(bundle_path)
        assert bundle.variant_label == "concise"
        assert len(bundle.feature_layout.entries) == 6
        assert (bundle.hyper.n_trees, bundle.hyper.max_depth, bundle.hyper.seed) == (6, 10, 42)
        assert 15.0 in bundle.certainty

    def test_default_hyper_seed(self, synth_csv, tmp_path):
        out = tmp_path / "defaults.glad-model.json"
        assert run("train", "--data", str(synth_csv), "--folds", "3", "--trees", "5", "--out", str(out)) == 0
        manifest = json.loads((tmp_path / "defaults.glad-model.json.manifest.json").read_text())
        assert manifest["params"]["hyper"]["seed"] == 42
        assert manifest["params"]["hyper"]["max_depth"] == 10

    def test_byte_identical_reruns(self, synth_csv, bundle_path, tmp_path):
        out = tmp_path / "again.glad-model.json"
        code = run(
            "train", "--data", str(synth_csv), "--variant", "concise",
            "--folds", "3", "--trees", "6", "--out", str(out),
        )
        assert code == 0
        assert out.read_bytes() == bundle_path.read_bytes()

    def test_unknown_variant_usage_error(self, synth_csv, tmp_path):
        assert run("train", "--data", str(synth_csv), "--variant", "best", "--out", str(tmp_path / "x.json")) == 2


@pytest.fixture(scope="module")
def model_path(fixed_bundle, tmp_path_factory):  # noqa: F811
    path = tmp_path_factory.mktemp("fixed") / "fixed.glad-model.json"
    save_bundle(fixed_bundle, path)
    return path


class TestPredictCommand:
    def record(self, **overrides):
        body = {
            "age": 65.0,
            "bmi": 28.6,
            "baseline_pain": 45.0,
            "symptom_duration": 40.0,
            "walk40m": 28.2,
            "eq5d": 0.78,
        }
        body.update(overrides)
        return body

    def test_worked_example_json(self, model_path, tmp_path, capsys):
        record = tmp_path / "rec.json"
        record.write_text(json.dumps(self.record()))
        assert run("predict", "--model", str(model_path), "--input", str(record), "--margin", "15") == 0
        out = json.loads(capsys.readouterr().out)
        assert out["predicted_change"] == 20.0
        assert out["interval"] == {"lower": 10.0, "upper": 40.0, "margin": 15.0}
        assert out["certainty_pct"] == pytest.approx(57.95)

    def test_csv_row_input(self, model_path, tmp_path, capsys):
        record = tmp_path / "rec.csv"
        fields = self.record()
        record.write_text(",".join(fields) + "\n" + ",".join(str(v) for v in fields.values()) + "\n")
        assert run("predict", "--model", str(model_path), "--input", str(record)) == 0
        assert json.loads(capsys.readouterr().out)["predicted_post_pain"] == 25.0

    def test_missing_field_exit_2(self, model_path, tmp_path):
        record = tmp_path / "bad.json"
        body = self.record()
        del body["bmi"]
        record.write_text(json.dumps(body))
        assert run("predict", "--model", str(model_path), "--input", str(record)) == 2

    def test_nearest_margin_warning(self, model_path, tmp_path, capsys):
        record = tmp_path / "rec2.json"
        record.write_text(json.dumps(self.record()))
        assert run("predict", "--model", str(model_path), "--input", str(record), "--margin", "12") == 0
        out = json.loads(capsys.readouterr().out)
        assert "warning" in out and out["certainty_pct"] == pytest.approx(40.73)

    def test_missing_model_exit_2(self, tmp_path):
        record = tmp_path / "rec3.json"
        record.write_text(json.dumps(self.record()))
        assert run("predict", "--model", str(tmp_path / "ghost.json"), "--input", str(record)) == 2


class TestConfigFile:
    def test_config_supplies_flags_and_flags_override(self, synth_csv, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"folds": 3, "trees": 4, "variants": "concise"}))
        out = tmp_path / "cfg_eval"
        assert run("evaluate", "--data", str(synth_csv), "--config", str(config), "--out", str(out)) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["folds"] == 3
        assert [r["variant"] for r in report["reports"]] == ["concise"]

        out2 = tmp_path / "cfg_eval2"
        assert run(
            "evaluate", "--data", str(synth_csv), "--config", str(config),
            "--variants", "full", "--out", str(out2),
        ) == 0
        report2 = json.loads((out2 / "report.json").read_text())
        assert [r["variant"] for r in report2["reports"]] == ["full"]

"""Acceptance suite: one test per release criterion, with a pass/fail line each.

The replication criteria run the real CLI on the calibrated synthetic cohort
(n = 13931, seed 42, target R^2 0.32 with outcome mean 14.06 / sd 22.75), so
the reported reference values are the expected values by construction.
"""

import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

from gladpred.cli import main
from gladpred.forest import Hyperparams, fit_forest, fit_tree, predict_batch
from gladpred.evaluation import indicator_within, rho
from gladpred.schema import FeatureLayout
from gladpred.selection import CONCISE_IDS, Ranking, Variant, elbow_suggest, rank, variant_features

from oracles import oracle_tree, trees_equal


@contextmanager
def criterion(num, description):
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {num}: {description}")
        raise
    print(f"[PASS] criterion {num}: {description}")


def run_cli(*argv):
    code = main([str(a) for a in argv])
    assert code == 0, f"command failed ({code}): {argv}"


@pytest.fixture(scope="module")
def replication(tmp_path_factory):
    """Criterion 1's pipeline: synth 13931 records, evaluate three variants."""
    root = tmp_path_factory.mktemp("replication")
    data = root / "cohort.csv"
    out = root / "eval"
    t0 = time.perf_counter()
    run_cli("synth", "--n", 13931, "--seed", 42, "--r2", 0.32, "--out", data)
    run_cli(
        "evaluate", "--data", data, "--variants", "full,topk:11,concise",
        "--folds", 10, "--margins", "5,10,15,20", "--out", out,
    )
    elapsed = time.perf_counter() - t0
    report = json.loads((out / "report.json").read_text())
    return {"data": data, "out": out, "elapsed": elapsed, "report": report}


class TestCriterion1:
    def test_calibrated_replication(self, replication):
        with criterion(1, "calibrated replication bands and runtime"):
            rows = replication["report"]["comparison"]["rows"]
            assert {r["variant"] for r in rows} == {"full", "topk:11", "concise"}
            for row in rows:
                assert 0.27 <= row["mean_r2"] <= 0.37, row
                assert 17.8 <= row["mean_rmse"] <= 19.8, row
                assert 0.47 <= row["rho_average"] <= 0.55, row
                assert row["rho_personalized"] - row["rho_average"] >= 0.03, row
            assert replication["elapsed"] <= 600, f"runtime {replication['elapsed']:.0f}s"


class TestCriterion2:
    def test_margin_dominance_and_monotonicity(self, replication):
        with criterion(2, "personalized rho dominates the average model at every margin"):
            for rep in replication["report"]["reports"]:
                table = rep["margin_table"]
                assert [row["margin"] for row in table] == [5.0, 10.0, 15.0, 20.0]
                pers = [row["rho_personalized"] for row in table]
                avg = [row["rho_average"] for row in table]
                for p, a in zip(pers, avg):
                    assert p >= a, rep["variant"]
                assert pers == sorted(pers)
                assert avg == sorted(avg)


class TestCriterion3:
    def test_supplementary_shape_run(self, tmp_path):
        with criterion(3, "extended46 pipeline emits the supplementary-shaped report"):
            data = tmp_path / "ext.csv"
            out = tmp_path / "eval_ext"
            run_cli("synth", "--n", 4908, "--seed", 42, "--r2", 0.32, "--dict", "extended46", "--out", data)
            run_cli(
                "evaluate", "--data", data, "--dict", "extended46",
                "--variants", "full,topk:14,concise", "--folds", 10, "--out", out,
            )
            report = json.loads((out / "report.json").read_text())
            assert report["n"] == 4908
            by_variant = {r["variant"]: r for r in report["reports"]}
            assert set(by_variant) == {"full", "topk:14", "concise"}
            assert len(by_variant["full"]["features"]) == 46
            assert by_variant["concise"]["features"] == list(CONCISE_IDS)
            lines = (out / "report.csv").read_text().splitlines()
            assert len(lines) == 4  # header + one row per variant


class TestCriterion4:
    def test_oracle_equivalence_100_instances(self):
        with criterion(4, "fit_tree matches the exhaustive reference builder on 100 instances"):
            rng = np.random.default_rng(2024)
            for case in range(100):
                n = int(rng.integers(4, 31))
                p = int(rng.integers(1, 6))
                if case % 3 == 0:
                    X = rng.integers(0, 5, size=(n, p)).astype(float)
                else:
                    X = rng.random((n, p)) * 10
                if case % 5 == 0 and p > 1:  # duplicated column exercises tie-breaks
                    X[:, -1] = X[:, 0]
                y = rng.integers(0, 101, size=n).astype(float)
                msl = int(rng.integers(1, 4))
                depth = int(rng.integers(1, 3))
                hyper = Hyperparams(max_depth=depth, min_samples_leaf=msl, bootstrap=False)
                tree = fit_tree(X, y, hyper, 0)
                ref = oracle_tree(X, y, max_depth=depth, min_samples_leaf=msl)
                assert trees_equal(tree, ref), f"case {case}: n={n} p={p} msl={msl} depth={depth}"


class TestCriterion5:
    def test_cli_determinism_and_thread_invariance(self, tmp_path):
        with criterion(5, "identical manifests give byte-identical artifacts across thread counts"):
            a_csv, b_csv = tmp_path / "a.csv", tmp_path / "b.csv"
            run_cli("synth", "--n", 500, "--seed", 3, "--r2", 0.32, "--out", a_csv)
            run_cli("synth", "--n", 500, "--seed", 3, "--r2", 0.32, "--out", b_csv)
            assert a_csv.read_bytes() == b_csv.read_bytes()

            outs = []
            for jobs, name in ((1, "j1"), (4, "j4")):
                out = tmp_path / name
                run_cli(
                    "evaluate", "--data", a_csv, "--variants", "full,topk:3,concise",
                    "--folds", 3, "--trees", 8, "--jobs", jobs, "--out", out,
                )
                outs.append(out)
            for artifact in ("report.json", "report.csv", "margin_sweep.csv", "importance.csv", "exclusions.json"):
                assert (outs[0] / artifact).read_bytes() == (outs[1] / artifact).read_bytes(), artifact

            m1, m2 = tmp_path / "m1.json", tmp_path / "m2.json"
            run_cli("train", "--data", a_csv, "--variant", "concise", "--folds", 3, "--trees", 8, "--out", m1)
            run_cli("train", "--data", a_csv, "--variant", "concise", "--folds", 3, "--trees", 8, "--jobs", 2, "--out", m2)
            assert m1.read_bytes() == m2.read_bytes()


class TestCriterion6:
    def test_metric_identities(self, small_cohort):
        with criterion(6, "metric identities, bounds, and transform invariance"):
            rng = np.random.default_rng(0)

            # rho of the average model == empirical fraction within the margin, exactly
            y = rng.normal(14, 22, size=700)
            mu = float(y[:500].mean())
            for margin in (5.0, 10.0, 15.0, 20.0):
                assert rho(y, np.full_like(y, mu), margin) == float(np.mean(np.abs(y - mu) <= margin))

            # the boundary case (|pred - true| == R) counts as inside
            assert indicator_within(20, 35, 15) == 1
            assert indicator_within(20, 5, 15) == 1
            assert indicator_within(20, 35.0000001, 15) == 0

            # importances normalized
            layout, X = small_cohort.project(("baseline_pain", "age", "bmi", "eq5d"))
            model = fit_forest(X, small_cohort.outcomes, layout, Hyperparams(n_trees=10, max_depth=6))
            assert abs(model.importances.sum() - 1.0) <= 1e-9

            # predictions bounded by the training outcome range
            probe = rng.random((500, 4)) * np.array([100.0, 70.0, 50.0, 1.5]) - np.array([0, 0, 0, 0.5])
            preds = predict_batch(model, probe)
            assert preds.min() >= small_cohort.outcomes.min()
            assert preds.max() <= small_cohort.outcomes.max()

            # monotone transform invariance on 20 random datasets
            for case in range(20):
                n, p = 50, 4
                Xr = rng.random((n, p)) * 10
                yr = rng.normal(size=n) * 4 + Xr[:, 0]
                layout_r = FeatureLayout(tuple((f"x{j}", 1) for j in range(p)))
                hyper = Hyperparams(n_trees=5, max_depth=4, bootstrap=False, mtry=2)
                base = fit_forest(Xr, yr, layout_r, hyper)
                Xt = Xr.copy()
                col = case % p
                Xt[:, col] = Xt[:, col] ** 3 + 2.0
                transformed = fit_forest(Xt, yr, layout_r, hyper)
                assert np.array_equal(predict_batch(base, Xr), predict_batch(transformed, Xt)), f"case {case}"


class TestCriterion7:
    def test_selection_contracts(self, base_dict):
        with criterion(7, "elbow suggestion, top-k prefix property, concise set"):
            knee = Ranking(tuple((f"v{i}", v) for i, v in enumerate([0.4, 0.3, 0.2, 0.04, 0.03, 0.02, 0.01])))
            assert elbow_suggest(knee) == 3

            rng = np.random.default_rng(5)
            scores = {vid: float(v) for vid, v in zip(base_dict.predictor_ids, rng.random(34))}
            ranking = rank(scores, base_dict)
            previous = ()
            for k in range(1, 35):
                ids = variant_features(Variant("topk", k), ranking, base_dict)
                assert len(ids) == k and ids[: len(previous)] == previous
                previous = ids

            assert variant_features(Variant("concise"), ranking, base_dict) == (
                "baseline_pain", "symptom_duration", "eq5d", "walk40m", "age", "bmi",
            )
            assert variant_features(Variant("concise"), None, base_dict) == CONCISE_IDS

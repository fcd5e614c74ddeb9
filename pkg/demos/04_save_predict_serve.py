"""Train a concise bundle, persist it, and answer a what-if question.

Run with:  python demos/04_save_predict_serve.py
"""

import tempfile
from pathlib import Path

from gladpred.cohort import calibrate_signal, generate_synthetic, write_csv
from gladpred.forest import Hyperparams
from gladpred.modelstore import load_bundle, save_bundle
from gladpred.pipeline import train_bundle
from gladpred.schema import builtin_dictionary
from gladpred.selection import Variant
from gladpred.service import prediction_response

dictionary = builtin_dictionary("base34")
cohort = generate_synthetic(calibrate_signal(dictionary, r2=0.32), n=3000, seed=42)

bundle = train_bundle(cohort, Variant("concise"), Hyperparams(n_trees=20), folds=5)
print(f"bundle: variant={bundle.variant_label} features={[v for v, _ in bundle.feature_layout.entries]}")
print("certainty table (rho at each margin, from cross-validation):")
for margin in sorted(bundle.certainty):
    print(f"  +/-{margin:4.0f} points -> {100 * bundle.certainty[margin]:.1f}%")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "concise.glad-model.json"
    save_bundle(bundle, path)
    print(f"\nsaved {path.stat().st_size // 1024} KiB; canonical JSON so re-saving is byte-identical")
    loaded = load_bundle(path)

    # The worked what-if: a patient at baseline pain 45.
    patient = {
        "baseline_pain": 45.0,
        "symptom_duration": 24.0,
        "eq5d": 0.80,
        "walk40m": 27.0,
        "age": 66.0,
        "bmi": 29.0,
    }
    answer = prediction_response(loaded, patient, margin=15.0)
    change = answer["predicted_change"]
    interval = answer["interval"]
    print(f"\npredicted change: {change:+.1f} VAS points")
    print(
        f"expected pain after the program: {answer['predicted_post_pain']:.0f} "
        f"(between {interval['lower']:.0f} and {interval['upper']:.0f} "
        f"with {answer['certainty_pct']:.0f}% certainty)"
    )

    # Export the cohort too; `gladpred train/evaluate` consume this CSV format.
    write_csv(cohort, Path(tmp) / "cohort.csv")
    print("\nto serve the model over HTTP:")
    print(f"  gladpred serve --model {path.name} --addr 127.0.0.1:8000")
    print("endpoints: POST /predict, GET /health, GET /model")

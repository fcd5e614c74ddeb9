"""Fit the seeded forest, inspect variable importances, and suggest a cut-point.

Run with:  python demos/02_forest_and_importance.py
"""

from gladpred.cohort import calibrate_signal, generate_synthetic, kfold_plan
from gladpred.forest import Hyperparams, fit_forest, importances, predict
from gladpred.pipeline import compute_ranking
from gladpred.schema import builtin_dictionary
from gladpred.selection import elbow_suggest

dictionary = builtin_dictionary("base34")
cohort = generate_synthetic(calibrate_signal(dictionary, r2=0.32), n=3000, seed=42)

# A forest on the full predictor set. Training is bit-reproducible: every
# random stream derives from (seed, tree_index).
hyper = Hyperparams(n_trees=30, max_depth=10, seed=42)
layout, X = cohort.project(dictionary.predictor_ids)
model = fit_forest(X, cohort.outcomes, layout, hyper)
print(f"forest: {len(model.trees)} trees, first tree has {model.trees[0].n_nodes} nodes")
print(f"train outcome range: [{model.train_outcome_stats.min:.1f}, {model.train_outcome_stats.max:.1f}]")

one = predict(model, X[0])
print(f"prediction for record 0: {one:.2f} (true change {cohort.outcomes[0]:.2f})\n")

by_variable = importances(model)
top = sorted(by_variable.items(), key=lambda kv: -kv[1])[:8]
print("top importances (single full-data fit):")
for vid, value in top:
    print(f"  {vid:18s} {value:.4f}")
print(f"sum of all importances: {sum(by_variable.values()):.9f}\n")

# The replication default averages importances over cross-validation folds.
plan = kfold_plan(cohort.n, 5, seed=42)
ranking, _ = compute_ranking(cohort, Hyperparams(n_trees=10), plan, mode="cv")
k = elbow_suggest(ranking)
print(f"fold-averaged ranking head: {[vid for vid, _ in ranking.entries[:6]]}")
print(f"elbow suggestion: keep the top {k} variables")
print("(replication runs take k from configuration; the suggestion is advisory)")

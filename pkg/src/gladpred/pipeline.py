"""Orchestration shared by the CLI: cohort loading, ranking, evaluation, training."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cohort import Cohort, ExclusionReport, FoldPlan, apply_exclusions, kfold_plan, load_csv
from .errors import ArgumentError
from .evaluation import (
    DEFAULT_MARGINS,
    ComparisonTable,
    CVResult,
    EvalReport,
    comparison_report,
    cross_validate,
)
from .forest import Hyperparams, fit_forest, importances
from .modelstore import ModelBundle, make_bundle
from .schema import DataDictionary, builtin_dictionary
from .selection import FULL, Ranking, Variant, elbow_suggest, rank, variant_features


def load_cohort(edition: str, csv_path) -> tuple[Cohort, ExclusionReport]:
    dictionary = builtin_dictionary(edition)
    records = load_csv(dictionary, csv_path)
    return apply_exclusions(dictionary, records)


def fold_averaged_importances(models) -> dict[str, float]:
    """Mean of per-fold normalized importance maps, renormalized."""
    acc: dict[str, float] = {}
    for model in models:
        for vid, value in importances(model).items():
            acc[vid] = acc.get(vid, 0.0) + value
    total = sum(acc.values())
    return {vid: v / total for vid, v in acc.items()}


def full_data_importances(cohort: Cohort, hyper: Hyperparams, n_jobs: int = 1) -> dict[str, float]:
    layout, X = cohort.project(cohort.dictionary.predictor_ids)
    model = fit_forest(X, cohort.outcomes, layout, hyper, n_jobs=n_jobs)
    return importances(model)


@dataclass(frozen=True)
class EvaluationRun:
    reports: tuple[EvalReport, ...]
    comparison: ComparisonTable
    ranking: Ranking | None
    elbow_k: int | None


def _ranking_from_cv(full_cv: CVResult, dictionary: DataDictionary) -> Ranking:
    return rank(fold_averaged_importances(full_cv.fold_models), dictionary)


def compute_ranking(
    cohort: Cohort,
    hyper: Hyperparams,
    fold_plan: FoldPlan,
    mode: str = "cv",
    n_jobs: int = 1,
    margins: Sequence[float] = DEFAULT_MARGINS,
) -> tuple[Ranking, CVResult | None]:
    """Importance ranking over all predictors; 'cv' averages over fold models."""
    if mode == "cv":
        full_cv = cross_validate(cohort, FULL, cohort.dictionary.predictor_ids, hyper, fold_plan, margins, n_jobs)
        return _ranking_from_cv(full_cv, cohort.dictionary), full_cv
    if mode == "full":
        return rank(full_data_importances(cohort, hyper, n_jobs), cohort.dictionary), None
    raise ArgumentError(f"unknown importance mode {mode!r}; expected cv or full")


def evaluate_variants(
    cohort: Cohort,
    variants: Sequence[Variant],
    hyper: Hyperparams,
    fold_plan: FoldPlan,
    margins: Sequence[float] = DEFAULT_MARGINS,
    n_jobs: int = 1,
    importance_mode: str = "cv",
    comparison_margin: float = 15.0,
) -> EvaluationRun:
    """Cross-validate each variant; the full-variant CV doubles as the ranking source."""
    if not variants:
        raise ArgumentError("no variants requested")
    dictionary = cohort.dictionary

    ranking: Ranking | None = None
    elbow_k: int | None = None
    cached_full: CVResult | None = None
    if any(v.kind == "topk" for v in variants):
        ranking, cached_full = compute_ranking(cohort, hyper, fold_plan, importance_mode, n_jobs, margins)
        elbow_k = elbow_suggest(ranking)

    results: list[CVResult] = []
    for variant in variants:
        if variant.kind == "full" and cached_full is not None:
            results.append(cached_full)
            continue
        ids = variant_features(variant, ranking, dictionary)
        results.append(cross_validate(cohort, variant, ids, hyper, fold_plan, margins, n_jobs))

    reports = tuple(r.report for r in results)
    return EvaluationRun(
        reports=reports,
        comparison=comparison_report(reports, margin=comparison_margin),
        ranking=ranking,
        elbow_k=elbow_k,
    )


def train_bundle(
    cohort: Cohort,
    variant: Variant,
    hyper: Hyperparams,
    folds: int = 10,
    margins: Sequence[float] = DEFAULT_MARGINS,
    n_jobs: int = 1,
    importance_mode: str = "cv",
) -> ModelBundle:
    """Cross-validate the variant for its certainty table, then fit on all data."""
    fold_plan = kfold_plan(cohort.n, folds, hyper.seed)
    ranking = None
    if variant.kind == "topk":
        ranking, _ = compute_ranking(cohort, hyper, fold_plan, importance_mode, n_jobs, margins)
    ids = variant_features(variant, ranking, cohort.dictionary)

    cv = cross_validate(cohort, variant, ids, hyper, fold_plan, margins, n_jobs)
    layout, X = cohort.project(ids)
    model = fit_forest(X, cohort.outcomes, layout, hyper, n_jobs=n_jobs)
    return make_bundle(model, cohort.dictionary, variant.label, cv.report, importances(model))

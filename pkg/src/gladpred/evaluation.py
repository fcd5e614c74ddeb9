"""Average-value baseline, error metrics, margin accuracy, and the CV harness.

The margin metrics follow the correctness convention: a prediction is
correct at margin R when true - R <= pred <= true + R (bounds inclusive);
rho is the fraction of correct predictions. Cross-validation pools the
held-out predictions of all folds for the margin table while RMSE/R^2 are
averaged per fold; R^2 always uses the evaluated set's own mean, so the
average model scores ~0 by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cohort import Cohort, FoldPlan
from .errors import (
    ArgumentError,
    EmptyTraining,
    LengthMismatch,
    MismatchedRuns,
    ZeroVariance,
)
from .forest import ForestModel, Hyperparams, fit_forest, predict_batch
from .selection import Variant

DEFAULT_MARGINS = (5.0, 10.0, 15.0, 20.0)


@dataclass(frozen=True)
class AverageModel:
    mu: float

    def predict(self, n: int) -> np.ndarray:
        return np.full(n, self.mu, dtype=np.float64)


def mean_model(y_train) -> AverageModel:
    y = np.asarray(y_train, dtype=np.float64)
    if y.size == 0:
        raise EmptyTraining("cannot fit the average model on zero samples")
    return AverageModel(mu=float(y.mean()))


def _paired(y_true, y_pred) -> tuple[np.ndarray, np.ndarray]:
    yt = np.asarray(y_true, dtype=np.float64)
    yp = np.asarray(y_pred, dtype=np.float64)
    if yt.shape != yp.shape or yt.ndim != 1 or yt.size == 0:
        raise LengthMismatch("y_true and y_pred must be equal-length nonempty vectors")
    return yt, yp


def rmse(y_true, y_pred) -> float:
    yt, yp = _paired(y_true, y_pred)
    return float(np.sqrt(np.mean((yt - yp) ** 2)))


def r_squared(y_true, y_pred) -> float:
    yt, yp = _paired(y_true, y_pred)
    if yt.size < 2:
        raise LengthMismatch("r_squared needs at least 2 samples")
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        raise ZeroVariance("evaluated outcomes are constant")
    ss_res = float(np.sum((yt - yp) ** 2))
    return 1.0 - ss_res / ss_tot


def indicator_within(y_true_i: float, pred_i: float, margin: float) -> int:
    """1 iff the prediction lies inside [true - R, true + R], bounds inclusive."""
    if margin <= 0:
        raise ArgumentError("margin must be > 0")
    return int(y_true_i - margin <= pred_i <= y_true_i + margin)


def rho(y_true, y_pred, margin: float) -> float:
    """Fraction of predictions within +/- margin of the true value."""
    if margin <= 0:
        raise ArgumentError("margin must be > 0")
    yt, yp = _paired(y_true, y_pred)
    return float(np.mean(np.abs(yp - yt) <= margin))


@dataclass(frozen=True)
class MarginTable:
    rows: tuple[tuple[float, float, float], ...]  # (margin, rho_personalized, rho_average)

    def personalized(self, margin: float) -> float:
        for m, rp, _ in self.rows:
            if m == margin:
                return rp
        raise ArgumentError(f"margin {margin} not in table")

    def average(self, margin: float) -> float:
        for m, _, ra in self.rows:
            if m == margin:
                return ra
        raise ArgumentError(f"margin {margin} not in table")

    def to_json_obj(self) -> list:
        return [{"margin": m, "rho_personalized": rp, "rho_average": ra} for m, rp, ra in self.rows]


def margin_sweep(y_true, preds_personalized, mu, margins: Sequence[float]) -> MarginTable:
    """rho per margin for the personalized predictions and the average model.

    ``mu`` may be a scalar or a per-sample vector (pooled folds have one mu
    per training complement).
    """
    margins = tuple(float(m) for m in margins)
    if not margins or any(m <= 0 for m in margins) or list(margins) != sorted(margins):
        raise ArgumentError("margins must be nonempty, ascending, and > 0")
    yt, yp = _paired(y_true, preds_personalized)
    avg = np.broadcast_to(np.asarray(mu, dtype=np.float64), yt.shape)
    rows = tuple((m, rho(yt, yp, m), rho(yt, avg, m)) for m in margins)
    return MarginTable(rows)


@dataclass(frozen=True)
class FoldMetrics:
    rmse: float
    r2: float


@dataclass(frozen=True)
class EvalReport:
    variant_label: str
    feature_ids: tuple[str, ...]
    per_fold: tuple[FoldMetrics, ...]
    mean_rmse: float
    mean_r2: float
    pooled_rmse: float
    pooled_r2: float
    margin_table: MarginTable
    n: int
    folds: int
    seed: int

    def to_json_obj(self) -> dict:
        return {
            "variant": self.variant_label,
            "features": list(self.feature_ids),
            "per_fold": [{"rmse": f.rmse, "r2": f.r2} for f in self.per_fold],
            "mean_rmse": self.mean_rmse,
            "mean_r2": self.mean_r2,
            "pooled_rmse": self.pooled_rmse,
            "pooled_r2": self.pooled_r2,
            "margin_table": self.margin_table.to_json_obj(),
            "n": self.n,
            "folds": self.folds,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class CVResult:
    report: EvalReport
    fold_models: tuple[ForestModel, ...]
    oof_personalized: np.ndarray  # held-out forest predictions, record order
    oof_average: np.ndarray  # held-out average-model predictions, record order


def cross_validate(
    cohort: Cohort,
    variant: Variant,
    feature_ids: Sequence[str],
    hyper: Hyperparams,
    fold_plan: FoldPlan,
    margins: Sequence[float] = DEFAULT_MARGINS,
    n_jobs: int = 1,
) -> CVResult:
    """K-fold evaluation: fit on each complement, score the held-out fold.

    Held-out predictions land in preallocated arrays indexed by record, so
    pooled metrics cannot depend on fold processing order.
    """
    if fold_plan.n != cohort.n:
        raise ArgumentError(f"fold plan covers {fold_plan.n} records, cohort has {cohort.n}")
    layout, X = cohort.project(feature_ids)
    y = cohort.outcomes

    oof_pred = np.empty(cohort.n, dtype=np.float64)
    oof_avg = np.empty(cohort.n, dtype=np.float64)
    per_fold: list[FoldMetrics] = []
    models: list[ForestModel] = []
    for fold in range(fold_plan.k):
        test = fold_plan.test_indices(fold)
        train = fold_plan.train_indices(fold)
        model = fit_forest(X[train], y[train], layout, hyper, n_jobs=n_jobs)
        preds = predict_batch(model, X[test])
        oof_pred[test] = preds
        oof_avg[test] = mean_model(y[train]).mu
        per_fold.append(FoldMetrics(rmse=rmse(y[test], preds), r2=r_squared(y[test], preds)))
        models.append(model)

    table = margin_sweep(y, oof_pred, oof_avg, margins)
    report = EvalReport(
        variant_label=variant.label,
        feature_ids=tuple(feature_ids),
        per_fold=tuple(per_fold),
        mean_rmse=float(np.mean([f.rmse for f in per_fold])),
        mean_r2=float(np.mean([f.r2 for f in per_fold])),
        pooled_rmse=rmse(y, oof_pred),
        pooled_r2=r_squared(y, oof_pred),
        margin_table=table,
        n=cohort.n,
        folds=fold_plan.k,
        seed=fold_plan.seed,
    )
    return CVResult(report, tuple(models), oof_pred, oof_avg)


def evaluate_holdout(
    cohort: Cohort,
    variant: Variant,
    feature_ids: Sequence[str],
    hyper: Hyperparams,
    test_fraction: float = 0.2,
    seed: int = 42,
    margins: Sequence[float] = DEFAULT_MARGINS,
    n_jobs: int = 1,
) -> EvalReport:
    """Single shuffled train/test split; CV is the canonical mode."""
    if not 0.0 < test_fraction < 1.0:
        raise ArgumentError("test_fraction must be in (0, 1)")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    perm = rng.permutation(cohort.n)
    n_test = max(1, int(round(cohort.n * test_fraction)))
    if n_test >= cohort.n:
        raise ArgumentError("holdout leaves no training data")
    test, train = perm[:n_test], perm[n_test:]

    layout, X = cohort.project(feature_ids)
    y = cohort.outcomes
    model = fit_forest(X[train], y[train], layout, hyper, n_jobs=n_jobs)
    preds = predict_batch(model, X[test])
    mu = mean_model(y[train]).mu
    metrics = FoldMetrics(rmse=rmse(y[test], preds), r2=r_squared(y[test], preds))
    return EvalReport(
        variant_label=variant.label,
        feature_ids=tuple(feature_ids),
        per_fold=(metrics,),
        mean_rmse=metrics.rmse,
        mean_r2=metrics.r2,
        pooled_rmse=metrics.rmse,
        pooled_r2=metrics.r2,
        margin_table=margin_sweep(y[test], preds, mu, margins),
        n=cohort.n,
        folds=1,
        seed=seed,
    )


@dataclass(frozen=True)
class ComparisonTable:
    margin: float
    rows: tuple[tuple[str, float, float, float, float], ...]
    # (variant, mean_rmse, mean_r2, rho_personalized, rho_average)

    def to_json_obj(self) -> dict:
        return {
            "margin": self.margin,
            "rows": [
                {
                    "variant": v,
                    "mean_rmse": r,
                    "mean_r2": q,
                    "rho_personalized": rp,
                    "rho_average": ra,
                }
                for v, r, q, rp, ra in self.rows
            ],
        }


def comparison_report(reports: Sequence[EvalReport], margin: float = 15.0) -> ComparisonTable:
    """Variant-by-variant summary at one margin (the reporting default is 15)."""
    if not reports:
        raise ArgumentError("no reports to compare")
    first = reports[0]
    for rep in reports[1:]:
        if (rep.n, rep.folds, rep.seed) != (first.n, first.folds, first.seed):
            raise MismatchedRuns("reports come from different cohorts or fold plans")
    rows = tuple(
        (
            rep.variant_label,
            rep.mean_rmse,
            rep.mean_r2,
            rep.margin_table.personalized(margin),
            rep.margin_table.average(margin),
        )
        for rep in reports
    )
    return ComparisonTable(margin=float(margin), rows=rows)

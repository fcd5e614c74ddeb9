"""Cohort ingestion, exclusion pipeline, calibrated synthetic generation, folds.

Synthetic sampling draws every continuous predictor from a truncated normal
whose underlying location is solved (Brent root-finding on the analytic
truncated mean) so that the *truncated* distribution reproduces the
dictionary mean at the dictionary bounds; sampling itself is rejection from
the untruncated normal. Binary and categorical predictors follow the
dictionary proportions. Streams are PCG64 generators keyed as
SeedSequence(seed, spawn_key=(variable_index,)) per predictor and a fixed
key for the outcome noise, so edits to one variable never shift another's
draws.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy import optimize, stats

from .errors import ArgumentError, CalibrationError, EmptyCohort, HeaderMismatch, IoError
from .schema import (
    Binary,
    Continuous,
    DataDictionary,
    FeatureLayout,
    PatientRecord,
    builtin_dictionary,
    encode,
    parse_bool,
    validate,
)

ADMIN_COLUMNS = ("primary_joint", "start_date", "followup_complete")
EXCLUSION_REASONS = ("not-knee-primary", "incomplete-data", "in-2016-window", "no-followup")

# Registration window during which one variable went uncollected; records
# starting inside it (inclusive) are excluded.
WINDOW_START = dt.date(2016, 5, 23)
WINDOW_END = dt.date(2016, 11, 12)

# Relative variance shares of the six clinical signal variables used by
# calibrated synthetic cohorts; baseline pain dominates.
SIGNAL_SHAPE = {
    "baseline_pain": 0.530013,
    "symptom_duration": 0.054654,
    "eq5d": 0.065382,
    "walk40m": 0.05466,
    "age": 0.037102,
    "bmi": 0.043376,
}
SIGNAL_SIGNS = {
    "baseline_pain": 1.0,
    "symptom_duration": -1.0,
    "eq5d": 1.0,
    "walk40m": -1.0,
    "age": -1.0,
    "bmi": -1.0,
}

_NOISE_STREAM_KEY = 0xFFFF  # outcome-noise spawn key, distinct from variable indices


@dataclass(frozen=True, eq=False)
class Cohort:
    dictionary: DataDictionary
    features: np.ndarray  # (n, width) in the dictionary's full layout
    outcomes: np.ndarray  # (n,) change scores in [-100, 100]
    record_ids: tuple[str, ...]

    def __post_init__(self):
        if self.features.shape[0] == 0:
            raise EmptyCohort("cohort has no records")
        if self.outcomes.min() < -100.0 or self.outcomes.max() > 100.0:
            raise ArgumentError("outcomes outside [-100, 100]")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dict_hash(self) -> str:
        return self.dictionary.content_hash

    @property
    def layout(self) -> FeatureLayout:
        return self.dictionary.layout()

    def project(self, feature_ids: Sequence[str]) -> tuple[FeatureLayout, np.ndarray]:
        """Column subset for a variant: (sub-layout, (n, sub-width) matrix)."""
        sub = self.dictionary.layout(feature_ids)
        offsets = self.layout.offsets()
        cols: list[int] = []
        for vid, _ in sub.entries:
            start, stop = offsets[vid]
            cols.extend(range(start, stop))
        return sub, np.ascontiguousarray(self.features[:, cols])


@dataclass(frozen=True)
class ExclusionReport:
    total_in: int
    excluded: tuple[tuple[str, int], ...]  # (reason, count) in fixed order
    included: int

    def __post_init__(self):
        if self.included + sum(c for _, c in self.excluded) != self.total_in:
            raise ArgumentError("exclusion counts do not conserve total")

    def to_json_obj(self) -> dict:
        return {
            "total_in": self.total_in,
            "excluded": [{"reason": r, "count": c} for r, c in self.excluded],
            "included": self.included,
        }


@dataclass(frozen=True)
class SyntheticConfig:
    dictionary: DataDictionary
    signal: Mapping[str, float]  # variable id -> VAS points per unit
    intercept: float
    noise_sd: float
    truncate: bool = True

    def __post_init__(self):
        for vid in self.signal:
            spec = self.dictionary.get(vid)
            if not isinstance(spec.kind, Continuous):
                raise ArgumentError(f"signal variable {vid} is not continuous")
        if self.noise_sd < 0:
            raise ArgumentError("noise_sd must be >= 0")

    def to_json_obj(self) -> dict:
        return {
            "edition": self.dictionary.edition,
            "dict_hash": self.dictionary.content_hash,
            "signal": dict(sorted(self.signal.items())),
            "intercept": self.intercept,
            "noise_sd": self.noise_sd,
            "truncate": self.truncate,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SyntheticConfig":
        return cls(
            dictionary=builtin_dictionary(obj["edition"]),
            signal={k: float(v) for k, v in obj["signal"].items()},
            intercept=float(obj["intercept"]),
            noise_sd=float(obj["noise_sd"]),
            truncate=bool(obj["truncate"]),
        )


@dataclass(frozen=True, eq=False)
class FoldPlan:
    k: int
    assignment: np.ndarray  # (n,) fold index per record
    seed: int

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != fold)


def load_csv(dictionary: DataDictionary, path) -> list[PatientRecord]:
    """Read patient records; parse problems surface later as validation violations."""
    try:
        f = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    with f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        required = set(dictionary.predictor_ids) | set(ADMIN_COLUMNS)
        allowed = required | {dictionary.outcome.id}
        missing = sorted(required - set(header))
        extra = sorted(set(header) - allowed)
        if missing or extra:
            raise HeaderMismatch(missing, extra)
        records = []
        for i, row in enumerate(reader):
            start_raw = (row.get("start_date") or "").strip()
            try:
                start = dt.date.fromisoformat(start_raw)
            except ValueError:
                start = None
            values = {k: v for k, v in row.items() if k not in ADMIN_COLUMNS}
            if dictionary.outcome.id in values and (values[dictionary.outcome.id] or "").strip() == "":
                del values[dictionary.outcome.id]
            records.append(
                PatientRecord(
                    record_id=f"r{i:06d}",
                    values=values,
                    primary_joint=(row.get("primary_joint") or "").strip().lower(),
                    start_date=start,
                    followup_complete=parse_bool(row.get("followup_complete")),
                )
            )
        return records


def apply_exclusions(dictionary: DataDictionary, records: Sequence[PatientRecord]) -> tuple[Cohort, ExclusionReport]:
    """Keep complete knee records outside the 2016 window with follow-up.

    Each excluded record counts under the first failing reason in
    EXCLUSION_REASONS order; an unparseable start date counts as incomplete.
    """
    counts = {reason: 0 for reason in EXCLUSION_REASONS}
    kept: list[PatientRecord] = []
    for rec in records:
        if rec.primary_joint != "knee":
            counts["not-knee-primary"] += 1
        elif not validate(dictionary, rec, require_outcome=True).ok or rec.start_date is None:
            counts["incomplete-data"] += 1
        elif WINDOW_START <= rec.start_date <= WINDOW_END:
            counts["in-2016-window"] += 1
        elif rec.followup_complete is not True:
            counts["no-followup"] += 1
        else:
            kept.append(rec)

    report = ExclusionReport(
        total_in=len(records),
        excluded=tuple((r, counts[r]) for r in EXCLUSION_REASONS),
        included=len(kept),
    )
    if not kept:
        raise EmptyCohort("all records excluded")

    width = dictionary.layout().width
    features = np.empty((len(kept), width), dtype=np.float64)
    outcomes = np.empty(len(kept), dtype=np.float64)
    for i, rec in enumerate(kept):
        features[i] = encode(dictionary, rec)
        outcomes[i] = float(rec.values[dictionary.outcome.id])
    cohort = Cohort(dictionary, features, outcomes, tuple(r.record_id for r in kept))
    return cohort, report


@lru_cache(maxsize=512)
def _truncated_location(mean: float, sd: float, lo: float, hi: float) -> float:
    """Location mu0 such that a normal(mu0, sd) truncated to [lo, hi] has the target mean."""

    def trunc_mean(mu0: float) -> float:
        a, b = (lo - mu0) / sd, (hi - mu0) / sd
        return float(stats.truncnorm.mean(a, b, loc=mu0, scale=sd))

    span = 8.0 * sd
    lo_b, hi_b = mean - span, mean + span
    while trunc_mean(lo_b) > mean:
        lo_b -= span
    while trunc_mean(hi_b) < mean:
        hi_b += span
    return float(optimize.brentq(lambda m0: trunc_mean(m0) - mean, lo_b, hi_b, xtol=1e-10))


def _sampling_moments(spec) -> tuple[float, float]:
    """(mean, sd) actually realized by the truncated sampler for a continuous spec."""
    kind, marg = spec.kind, spec.marginal
    mu0 = _truncated_location(marg.mean, marg.sd, kind.min, kind.max)
    a, b = (kind.min - mu0) / marg.sd, (kind.max - mu0) / marg.sd
    var = float(stats.truncnorm.var(a, b, loc=mu0, scale=marg.sd))
    return marg.mean, np.sqrt(var)


def calibrate_signal(
    dictionary: DataDictionary,
    r2: float,
    outcome_sd: float | None = None,
    outcome_mean: float | None = None,
) -> SyntheticConfig:
    """Coefficients over the six signal variables hitting the target R^2 and moments.

    Under independent marginals, Var(signal) = sum(w^2 * Var(x)); weights are
    scaled so Var(signal)/(Var(signal) + noise_sd^2) = r2 and the total
    outcome SD equals outcome_sd.
    """
    if outcome_sd is None:
        outcome_sd = dictionary.outcome.marginal.sd
    if outcome_mean is None:
        outcome_mean = dictionary.outcome.marginal.mean
    if not (np.isfinite(r2) and np.isfinite(outcome_sd) and np.isfinite(outcome_mean)):
        raise CalibrationError("targets must be finite")
    if not 0.0 <= r2 < 1.0:
        raise CalibrationError(f"r2 must be in [0, 1), got {r2}")
    if outcome_sd <= 0:
        raise CalibrationError("outcome_sd must be > 0")

    total_share = sum(SIGNAL_SHAPE.values())
    signal: dict[str, float] = {}
    shift = 0.0
    for vid, share in SIGNAL_SHAPE.items():
        spec = dictionary.get(vid)
        mean, sd = _sampling_moments(spec)
        if r2 == 0.0:
            coeff = 0.0
        else:
            coeff = SIGNAL_SIGNS[vid] * outcome_sd * np.sqrt(r2 * share / total_share) / sd
        signal[vid] = float(coeff)
        shift += coeff * mean
    noise_sd = float(outcome_sd * np.sqrt(1.0 - r2))
    return SyntheticConfig(
        dictionary=dictionary,
        signal=signal,
        intercept=float(outcome_mean - shift),
        noise_sd=noise_sd,
        truncate=True,
    )


def _sample_truncated(rng: np.random.Generator, loc: float, sd: float, lo: float, hi: float, n: int) -> np.ndarray:
    out = np.empty(n, dtype=np.float64)
    pending = np.arange(n)
    while pending.size:
        draws = rng.normal(loc, sd, size=pending.size)
        ok = (draws >= lo) & (draws <= hi)
        out[pending[ok]] = draws[ok]
        pending = pending[~ok]
    return out


def generate_synthetic(config: SyntheticConfig, n: int, seed: int) -> Cohort:
    """Deterministic synthetic cohort matching the dictionary marginals."""
    if n < 1:
        raise ArgumentError("n must be >= 1")
    dictionary = config.dictionary
    layout = dictionary.layout()
    features = np.empty((n, layout.width), dtype=np.float64)
    signal = np.zeros(n, dtype=np.float64)

    pos = 0
    for v_index, spec in enumerate(dictionary.predictors):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(v_index,))))
        kind, marg = spec.kind, spec.marginal
        if isinstance(kind, Continuous):
            if config.truncate:
                loc = _truncated_location(marg.mean, marg.sd, kind.min, kind.max)
                col = _sample_truncated(rng, loc, marg.sd, kind.min, kind.max, n)
            else:
                col = rng.normal(marg.mean, marg.sd, size=n)
            features[:, pos] = col
            coeff = config.signal.get(spec.id)
            if coeff:
                signal += coeff * col
            pos += 1
        elif isinstance(kind, Binary):
            features[:, pos] = (rng.random(n) < marg.proportion).astype(np.float64)
            pos += 1
        else:
            levels = rng.choice(len(kind.levels), size=n, p=marg.proportions)
            block = np.zeros((n, len(kind.levels)), dtype=np.float64)
            block[np.arange(n), levels] = 1.0
            features[:, pos : pos + len(kind.levels)] = block
            pos += len(kind.levels)

    noise_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(_NOISE_STREAM_KEY,))))
    outcomes = config.intercept + signal + noise_rng.normal(0.0, config.noise_sd, size=n)
    np.clip(outcomes, -100.0, 100.0, out=outcomes)

    ids = tuple(f"s{i:06d}" for i in range(n))
    return Cohort(dictionary, features, outcomes, ids)


def write_csv(cohort: Cohort, path, start_date: str = "2019-06-01") -> None:
    """Write a cohort back to the CSV contract (floats via repr, exact round trip)."""
    dictionary = cohort.dictionary
    header = list(dictionary.predictor_ids) + list(ADMIN_COLUMNS) + [dictionary.outcome.id]
    offsets = dictionary.layout().offsets()
    try:
        f = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    with f:
        writer = csv.writer(f)
        writer.writerow(header)
        for i in range(cohort.n):
            row = []
            for spec in dictionary.predictors:
                start, stop = offsets[spec.id]
                if isinstance(spec.kind, Continuous):
                    row.append(repr(float(cohort.features[i, start])))
                elif isinstance(spec.kind, Binary):
                    row.append("yes" if cohort.features[i, start] >= 0.5 else "no")
                else:
                    level = int(np.argmax(cohort.features[i, start:stop]))
                    row.append(spec.kind.levels[level])
            row.extend(["knee", start_date, "yes", repr(float(cohort.outcomes[i]))])
            writer.writerow(row)


def kfold_plan(n: int, k: int, seed: int) -> FoldPlan:
    """Balanced shuffled partition; deterministic in (n, k, seed)."""
    if k < 2 or k > n:
        raise ArgumentError(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    perm = rng.permutation(n)
    assignment = np.empty(n, dtype=np.int32)
    base, rem = divmod(n, k)
    pos = 0
    for fold in range(k):
        size = base + (1 if fold < rem else 0)
        assignment[perm[pos : pos + size]] = fold
        pos += size
    return FoldPlan(k=k, assignment=assignment, seed=seed)

"""Registry data dictionary, record validation, and feature encoding.

The dictionary is data, not code: the two shipped editions (``base34``,
``extended46``) live as canonical JSON files under ``gladpred/data`` and are
loaded lazily. A dictionary's ``content_hash`` is the SHA-256 of its
canonical serialization (sorted keys, compact separators), so it is stable
across processes and platforms.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from .errors import ArgumentError, EncodingError, UnknownVariable

EDITIONS = ("base34", "extended46")

# Case-insensitive synonyms accepted for binary cells (CSV or JSON input).
TRUE_WORDS = frozenset({"yes", "y", "true", "1"})
FALSE_WORDS = frozenset({"no", "n", "false", "0"})


@dataclass(frozen=True)
class Continuous:
    min: float
    max: float

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise ArgumentError("continuous bounds must be finite")
        if not self.min < self.max:
            raise ArgumentError(f"continuous bounds inverted: [{self.min}, {self.max}]")


@dataclass(frozen=True)
class Binary:
    pass


@dataclass(frozen=True)
class Categorical:
    levels: tuple[str, ...]

    def __post_init__(self):
        if len(self.levels) < 3 or len(set(self.levels)) != len(self.levels):
            raise ArgumentError("categorical needs >= 3 distinct levels (2-level variables are Binary)")


Kind = Continuous | Binary | Categorical


@dataclass(frozen=True)
class ContinuousMarginal:
    mean: float
    sd: float


@dataclass(frozen=True)
class BinaryMarginal:
    positive: int
    total: int

    @property
    def proportion(self) -> float:
        return self.positive / self.total


@dataclass(frozen=True)
class CategoricalMarginal:
    counts: tuple[int, ...]

    @property
    def proportions(self) -> tuple[float, ...]:
        total = sum(self.counts)
        return tuple(c / total for c in self.counts)


@dataclass(frozen=True)
class VariableSpec:
    id: str
    prompt: str
    kind: Kind
    marginal: ContinuousMarginal | BinaryMarginal | CategoricalMarginal
    units: str = ""

    def __post_init__(self):
        if isinstance(self.kind, Continuous):
            if not self.kind.min <= self.marginal.mean <= self.kind.max:
                raise ArgumentError(f"{self.id}: marginal mean outside [min, max]")

    @property
    def width(self) -> int:
        return len(self.kind.levels) if isinstance(self.kind, Categorical) else 1


@dataclass(frozen=True)
class FeatureLayout:
    """Ordered (variable id, width) pairs defining the encoded column space."""

    entries: tuple[tuple[str, int], ...]

    @property
    def width(self) -> int:
        return sum(w for _, w in self.entries)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(i for i, _ in self.entries)

    def offsets(self) -> dict[str, tuple[int, int]]:
        """Map variable id -> (start, stop) column slice."""
        out = {}
        pos = 0
        for vid, w in self.entries:
            out[vid] = (pos, pos + w)
            pos += w
        return out

    def column_owner(self) -> list[str]:
        """Variable id owning each encoded column, in order."""
        return [vid for vid, w in self.entries for _ in range(w)]


@dataclass(frozen=True)
class DataDictionary:
    edition: str
    predictors: tuple[VariableSpec, ...]
    outcome: VariableSpec

    def __post_init__(self):
        ids = [p.id for p in self.predictors] + [self.outcome.id]
        if len(set(ids)) != len(ids):
            raise ArgumentError("duplicate variable ids in dictionary")
        if self.edition == "base34":
            self._check_partition(34, 11, 22, 1)
        elif self.edition == "extended46":
            if len(self.predictors) != 46:
                raise ArgumentError("extended46 edition must have 46 predictors")

    def _check_partition(self, n, n_cont, n_bin, n_cat):
        kinds = [p.kind for p in self.predictors]
        counts = (
            len(kinds),
            sum(isinstance(k, Continuous) for k in kinds),
            sum(isinstance(k, Binary) for k in kinds),
            sum(isinstance(k, Categorical) for k in kinds),
        )
        if counts != (n, n_cont, n_bin, n_cat):
            raise ArgumentError(f"{self.edition}: predictor partition {counts} != {(n, n_cont, n_bin, n_cat)}")

    @property
    def predictor_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.predictors)

    def get(self, variable_id: str) -> VariableSpec:
        for p in self.predictors:
            if p.id == variable_id:
                return p
        if variable_id == self.outcome.id:
            return self.outcome
        raise UnknownVariable(variable_id)

    def layout(self, feature_ids: Sequence[str] | None = None) -> FeatureLayout:
        ids = self.predictor_ids if feature_ids is None else tuple(feature_ids)
        entries = []
        for vid in ids:
            spec = self.get(vid)
            if vid == self.outcome.id:
                raise ArgumentError("outcome cannot appear in a feature layout")
            entries.append((vid, spec.width))
        return FeatureLayout(tuple(entries))

    def to_json_obj(self) -> dict:
        return {
            "edition": self.edition,
            "predictors": [_spec_to_obj(p) for p in self.predictors],
            "outcome": _spec_to_obj(self.outcome),
        }

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.to_json_obj()).encode("utf-8")).hexdigest()


def canonical_json(obj) -> str:
    """Canonical serialization: sorted keys, compact separators, no NaN."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def _spec_to_obj(spec: VariableSpec) -> dict:
    if isinstance(spec.kind, Continuous):
        kind = {"type": "continuous", "min": spec.kind.min, "max": spec.kind.max}
        marg = {"mean": spec.marginal.mean, "sd": spec.marginal.sd}
    elif isinstance(spec.kind, Binary):
        kind = {"type": "binary"}
        marg = {"positive": spec.marginal.positive, "total": spec.marginal.total}
    else:
        kind = {"type": "categorical", "levels": list(spec.kind.levels)}
        marg = {"counts": list(spec.marginal.counts)}
    return {"id": spec.id, "prompt": spec.prompt, "kind": kind, "marginal": marg, "units": spec.units}


def _spec_from_obj(obj: dict) -> VariableSpec:
    k = obj["kind"]
    m = obj["marginal"]
    if k["type"] == "continuous":
        kind: Kind = Continuous(float(k["min"]), float(k["max"]))
        marg = ContinuousMarginal(float(m["mean"]), float(m["sd"]))
    elif k["type"] == "binary":
        kind = Binary()
        marg = BinaryMarginal(int(m["positive"]), int(m["total"]))
    elif k["type"] == "categorical":
        kind = Categorical(tuple(k["levels"]))
        marg = CategoricalMarginal(tuple(int(c) for c in m["counts"]))
    else:
        raise ArgumentError(f"unknown kind type {k['type']!r}")
    return VariableSpec(obj["id"], obj["prompt"], kind, marg, obj.get("units", ""))


def dictionary_from_json_obj(obj: dict) -> DataDictionary:
    return DataDictionary(
        edition=obj["edition"],
        predictors=tuple(_spec_from_obj(p) for p in obj["predictors"]),
        outcome=_spec_from_obj(obj["outcome"]),
    )


@lru_cache(maxsize=None)
def builtin_dictionary(edition: str = "base34") -> DataDictionary:
    """Load one of the compiled-in dictionary editions."""
    if edition not in EDITIONS:
        raise ArgumentError(f"unknown dictionary edition {edition!r}; expected one of {EDITIONS}")
    path = resources.files("gladpred.data").joinpath(f"dictionary_{edition}.json")
    with path.open("r", encoding="utf-8") as f:
        return dictionary_from_json_obj(json.load(f))


@dataclass(frozen=True)
class PatientRecord:
    """One registry row: raw per-variable values plus administrative fields.

    Values may be raw CSV strings or already-typed; ``validate`` parses and
    checks them against the dictionary.
    """

    record_id: str
    values: Mapping[str, object]
    primary_joint: str = "knee"
    start_date: dt.date | None = None
    followup_complete: bool | None = None


@dataclass(frozen=True)
class Violation:
    variable_id: str
    reason: str  # "missing" | "unparseable" | "out-of-range"
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def parse_bool(raw: object) -> bool | None:
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, (int, float)) and raw in (0, 1):
        return bool(raw)
    if isinstance(raw, str):
        word = raw.strip().lower()
        if word in TRUE_WORDS:
            return True
        if word in FALSE_WORDS:
            return False
    return None


def parse_value(spec: VariableSpec, raw: object):
    """Parse a raw cell under the variable's kind.

    Returns (value, None) on success or (None, reason) with reason one of
    "missing" / "unparseable". Range checks are the caller's job.
    """
    if raw is None or (isinstance(raw, str) and raw.strip() == ""):
        return None, "missing"
    if isinstance(spec.kind, Continuous):
        try:
            value = float(raw)
        except (TypeError, ValueError):
            return None, "unparseable"
        if not np.isfinite(value):
            return None, "unparseable"
        return value, None
    if isinstance(spec.kind, Binary):
        value = parse_bool(raw)
        if value is None:
            return None, "unparseable"
        return value, None
    # categorical: case-insensitive match against level names
    if isinstance(raw, str):
        for level in spec.kind.levels:
            if raw.strip().lower() == level.lower():
                return level, None
    return None, "unparseable"


def validate(dictionary: DataDictionary, record: PatientRecord, *, require_outcome: bool = False) -> ValidationReport:
    """Check every dictionary variable of the record; violations are data, not failures."""
    violations: list[Violation] = []
    specs = list(dictionary.predictors)
    if require_outcome or record.values.get(dictionary.outcome.id) is not None:
        specs.append(dictionary.outcome)
    for spec in specs:
        raw = record.values.get(spec.id)
        value, reason = parse_value(spec, raw)
        if reason is not None:
            violations.append(Violation(spec.id, reason, f"value {raw!r}"))
            continue
        if isinstance(spec.kind, Continuous) and not (spec.kind.min <= value <= spec.kind.max):
            violations.append(
                Violation(spec.id, "out-of-range", f"{value} outside [{spec.kind.min}, {spec.kind.max}]")
            )
    return ValidationReport(tuple(violations))


def encode(
    dictionary: DataDictionary,
    record: PatientRecord,
    feature_ids: Sequence[str] | None = None,
    *,
    standardize: bool = False,
) -> np.ndarray:
    """Encode a validated record into a dense float vector.

    Continuous values pass through unscaled (z-scored when ``standardize``),
    binaries map to {0, 1}, categoricals to a one-hot block in level order.
    """
    layout = dictionary.layout(feature_ids)
    report = validate(dictionary, record)
    bad = [v for v in report.violations if v.variable_id in set(layout.ids)]
    if bad:
        raise EncodingError("; ".join(f"{v.variable_id}: {v.reason}" for v in bad))
    out = np.zeros(layout.width, dtype=np.float64)
    pos = 0
    for vid, width in layout.entries:
        spec = dictionary.get(vid)
        value, _ = parse_value(spec, record.values.get(vid))
        if isinstance(spec.kind, Continuous):
            if standardize:
                out[pos] = (value - spec.marginal.mean) / spec.marginal.sd
            else:
                out[pos] = value
        elif isinstance(spec.kind, Binary):
            out[pos] = 1.0 if value else 0.0
        else:
            out[pos + spec.kind.levels.index(value)] = 1.0
        pos += width
    return out

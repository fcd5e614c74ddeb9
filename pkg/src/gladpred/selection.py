"""Variable ranking, elbow-point suggestion, and model variant definitions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, UnknownVariable
from .schema import DataDictionary

# The six-variable set kept for clinical use, in its fixed reporting order.
CONCISE_IDS = ("baseline_pain", "symptom_duration", "eq5d", "walk40m", "age", "bmi")


@dataclass(frozen=True)
class Ranking:
    entries: tuple[tuple[str, float], ...]  # (variable id, importance), descending

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(vid for vid, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Variant:
    """One of the reported model variants: full, topk:K, or concise."""

    kind: str  # "full" | "topk" | "concise"
    k: int | None = None

    def __post_init__(self):
        if self.kind not in ("full", "topk", "concise"):
            raise ArgumentError(f"unknown variant kind {self.kind!r}")
        if self.kind == "topk" and (self.k is None or self.k < 1):
            raise ArgumentError("topk variant needs k >= 1")
        if self.kind != "topk" and self.k is not None:
            raise ArgumentError(f"{self.kind} variant takes no k")

    @property
    def label(self) -> str:
        return f"topk:{self.k}" if self.kind == "topk" else self.kind

    @classmethod
    def parse(cls, text: str) -> "Variant":
        text = text.strip().lower()
        if text == "full":
            return cls("full")
        if text == "concise":
            return cls("concise")
        if text.startswith("topk:"):
            try:
                return cls("topk", int(text.split(":", 1)[1]))
            except ValueError:
                pass
        raise ArgumentError(f"cannot parse variant {text!r}; expected full, topk:K, or concise")


FULL = Variant("full")
CONCISE = Variant("concise")


def rank(importance_map, dictionary: DataDictionary) -> Ranking:
    """Sort by importance descending; ties resolve by dictionary position."""
    if not importance_map:
        raise ArgumentError("importance map is empty")
    positions = {vid: i for i, vid in enumerate(dictionary.predictor_ids)}
    for vid in importance_map:
        if vid not in positions:
            raise UnknownVariable(vid)
    ordered = sorted(importance_map.items(), key=lambda item: (-item[1], positions[item[0]]))
    return Ranking(tuple((vid, float(v)) for vid, v in ordered))


def elbow_suggest(ranking: Ranking | tuple[tuple[str, float], ...]) -> int:
    """Suggested cut-point k from the importance profile's knee.

    Both axes are normalized to [0, 1] and each interior point's
    perpendicular distance to the chord joining the first and last points is
    measured; k is the 0-based position of the deepest point (ties toward
    smaller k), i.e. the number of variables kept before the curve flattens.
    A degenerate chord (linear or constant profile) suggests k = 1.
    """
    entries = ranking.entries if isinstance(ranking, Ranking) else tuple(ranking)
    m = len(entries)
    if m < 3:
        raise ArgumentError("elbow needs at least 3 ranked variables")
    values = np.asarray([v for _, v in entries], dtype=np.float64)
    span = values[0] - values[-1]
    if span <= 0.0:
        return 1
    x = np.arange(m, dtype=np.float64) / (m - 1)
    y = (values - values[-1]) / span
    # chord runs (0, 1) -> (1, 0); distance is proportional to |x + y - 1|
    dist = np.abs(x + y - 1.0)[1 : m - 1]
    return int(np.argmax(dist)) + 1


def variant_features(variant: Variant, ranking: Ranking | None, dictionary: DataDictionary) -> tuple[str, ...]:
    """Resolve a variant to its ordered predictor ids."""
    if variant.kind == "full":
        return dictionary.predictor_ids
    if variant.kind == "concise":
        known = set(dictionary.predictor_ids)
        for vid in CONCISE_IDS:
            if vid not in known:
                raise UnknownVariable(f"concise variable {vid} not in dictionary")
        return CONCISE_IDS
    if ranking is None:
        raise ArgumentError("topk variant needs a ranking")
    if variant.k > len(ranking):
        raise ArgumentError(f"topk k={variant.k} exceeds ranking size {len(ranking)}")
    return ranking.ids[: variant.k]

"""Versioned persistence of trained models as canonical JSON bundles.

A bundle carries everything the CLI, service, and UI need: the serialized
trees, the dictionary edition + hash they were trained against, per-variable
importances, and the margin -> rho certainty table from the bundle's
evaluation. Serialization is canonical (sorted keys, compact separators,
shortest round-trip floats), so identical bundles produce byte-identical
files and save/load/save is a fixed point.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import FormatVersionMismatch, IntegrityError, IoError, ValidationError
from .evaluation import EvalReport
from .forest import DecisionTree, ForestModel, Hyperparams, OutcomeStats
from .schema import DataDictionary, FeatureLayout, builtin_dictionary, canonical_json

FORMAT_VERSION = 1
REQUIRED_MARGIN = 15.0
BUNDLE_SUFFIX = ".glad-model.json"


def margin_key(margin: float) -> str:
    return repr(float(margin))


@dataclass(frozen=True, eq=False)
class ModelBundle:
    format_version: int
    dict_edition: str
    dict_hash: str
    variant_label: str
    hyper: Hyperparams
    feature_layout: FeatureLayout
    trees: tuple[DecisionTree, ...]
    importances: Mapping[str, float]
    certainty: Mapping[float, float]  # margin -> rho_personalized
    train_outcome_stats: OutcomeStats
    certainty_average: Mapping[float, float] | None = None
    evaluation: Mapping[str, float] | None = None

    def predict(self, feature_vector) -> float:
        return float(self.predict_batch(np.asarray(feature_vector, dtype=np.float64)[np.newaxis, :])[0])

    def predict_batch(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        acc = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            acc += tree.predict(X)
        return acc / len(self.trees)

    def nearest_margin(self, margin: float) -> float:
        """Closest available certainty margin (ties toward the smaller one)."""
        margins = sorted(self.certainty)
        return min(margins, key=lambda m: (abs(m - margin), m))

    @property
    def bundle_hash(self) -> str:
        return hashlib.sha256(canonical_json(bundle_to_json_obj(self)).encode("utf-8")).hexdigest()


def make_bundle(
    model: ForestModel,
    dictionary: DataDictionary,
    variant_label: str,
    report: EvalReport,
    importance_map: Mapping[str, float],
) -> ModelBundle:
    certainty = {m: rp for m, rp, _ in report.margin_table.rows}
    certainty_avg = {m: ra for m, _, ra in report.margin_table.rows}
    return ModelBundle(
        format_version=FORMAT_VERSION,
        dict_edition=dictionary.edition,
        dict_hash=dictionary.content_hash,
        variant_label=variant_label,
        hyper=model.hyper,
        feature_layout=model.feature_layout,
        trees=model.trees,
        importances=dict(importance_map),
        certainty=certainty,
        certainty_average=certainty_avg,
        train_outcome_stats=model.train_outcome_stats,
        evaluation={
            "mean_rmse": report.mean_rmse,
            "mean_r2": report.mean_r2,
            "n": report.n,
            "folds": report.folds,
            "seed": report.seed,
        },
    )


def _tree_to_obj(tree: DecisionTree) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "value": tree.value.tolist(),
    }


def _tree_from_obj(obj: dict) -> DecisionTree:
    n = len(obj["feature"])
    arrays = {}
    for key, dtype in (
        ("feature", np.int32),
        ("threshold", np.float64),
        ("left", np.int32),
        ("right", np.int32),
        ("value", np.float64),
    ):
        arr = np.asarray(obj[key], dtype=dtype)
        if arr.shape != (n,):
            raise IntegrityError(f"tree array {key} has inconsistent length")
        arrays[key] = arr
    # node sample counts and split gains are not persisted
    return DecisionTree(
        feature=arrays["feature"],
        threshold=arrays["threshold"],
        left=arrays["left"],
        right=arrays["right"],
        value=arrays["value"],
        n_samples=np.zeros(n, dtype=np.int32),
        impurity_decrease=np.zeros(n, dtype=np.float64),
    )


def _check_tree(tree: DecisionTree) -> None:
    n = tree.n_nodes
    if n == 0:
        raise IntegrityError("tree has no nodes")
    internal = tree.feature >= 0
    kids = np.concatenate([tree.left[internal], tree.right[internal]])
    if internal.any():
        if kids.min() < 1 or kids.max() >= n:
            raise IntegrityError("tree child index out of range")
        if len(np.unique(kids)) != len(kids):
            raise IntegrityError("tree child index repeated")
    if np.any(tree.left[~internal] != -1) or np.any(tree.right[~internal] != -1):
        raise IntegrityError("leaf with children")


def validate_bundle(bundle: ModelBundle) -> None:
    """Raise ValidationError when a bundle violates its invariants."""
    if bundle.format_version != FORMAT_VERSION:
        raise ValidationError(f"format_version must be {FORMAT_VERSION}")
    try:
        expected = builtin_dictionary(bundle.dict_edition).content_hash
    except Exception as exc:
        raise ValidationError(f"unknown dictionary edition {bundle.dict_edition!r}") from exc
    if bundle.dict_hash != expected:
        raise ValidationError("dict_hash does not match the named dictionary edition")
    if not bundle.trees:
        raise ValidationError("bundle has no trees")
    if REQUIRED_MARGIN not in bundle.certainty:
        raise ValidationError(f"certainty table is missing the margin {REQUIRED_MARGIN:g} entry")
    for m, r in bundle.certainty.items():
        if not (m > 0 and 0.0 <= r <= 1.0):
            raise ValidationError(f"certainty entry ({m}, {r}) out of range")
    for tree in bundle.trees:
        try:
            _check_tree(tree)
        except IntegrityError as exc:
            raise ValidationError(str(exc)) from exc


def bundle_to_json_obj(bundle: ModelBundle) -> dict:
    obj = {
        "format_version": bundle.format_version,
        "dict_edition": bundle.dict_edition,
        "dict_hash": bundle.dict_hash,
        "variant": bundle.variant_label,
        "hyper": bundle.hyper.to_json_obj(),
        "features": [[vid, w] for vid, w in bundle.feature_layout.entries],
        "trees": [_tree_to_obj(t) for t in bundle.trees],
        "importances": {k: float(v) for k, v in bundle.importances.items()},
        "certainty": {margin_key(m): float(r) for m, r in bundle.certainty.items()},
        "train_outcome_stats": bundle.train_outcome_stats.to_json_obj(),
    }
    if bundle.certainty_average is not None:
        obj["certainty_average"] = {margin_key(m): float(r) for m, r in bundle.certainty_average.items()}
    if bundle.evaluation is not None:
        obj["evaluation"] = dict(bundle.evaluation)
    return obj


def bundle_from_json_obj(obj: dict) -> ModelBundle:
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(f"bundle format_version {version!r}, expected {FORMAT_VERSION}")
    try:
        bundle = ModelBundle(
            format_version=version,
            dict_edition=obj["dict_edition"],
            dict_hash=obj["dict_hash"],
            variant_label=obj["variant"],
            hyper=Hyperparams.from_json_obj(obj["hyper"]),
            feature_layout=FeatureLayout(tuple((vid, int(w)) for vid, w in obj["features"])),
            trees=tuple(_tree_from_obj(t) for t in obj["trees"]),
            importances={k: float(v) for k, v in obj["importances"].items()},
            certainty={float(k): float(v) for k, v in obj["certainty"].items()},
            train_outcome_stats=OutcomeStats.from_json_obj(obj["train_outcome_stats"]),
            certainty_average=(
                {float(k): float(v) for k, v in obj["certainty_average"].items()}
                if "certainty_average" in obj
                else None
            ),
            evaluation=obj.get("evaluation"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"malformed bundle: {exc}") from exc
    try:
        validate_bundle(bundle)
    except ValidationError as exc:
        raise IntegrityError(str(exc)) from exc
    return bundle


def save_bundle(bundle: ModelBundle, path) -> None:
    validate_bundle(bundle)
    payload = canonical_json(bundle_to_json_obj(bundle)) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(payload)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_bundle(path) -> ModelBundle:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"bundle is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise IntegrityError("bundle root must be an object")
    return bundle_from_json_obj(obj)

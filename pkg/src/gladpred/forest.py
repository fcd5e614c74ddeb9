"""Seeded CART regression trees and a bootstrap-aggregated random forest.

Splits minimize sum-of-squared-error (the regression form of impurity
decrease); per-variable importance is the normalized SSE-reduction mass
accumulated over all splits of all trees. Every source of randomness is a
PCG64 stream derived as SeedSequence(seed, spawn_key=(tree_index,)), consumed
in a fixed order (bootstrap indices first, then per-node feature draws in
depth-first preorder, left subtree first), so training is bit-reproducible
regardless of thread count or tree execution order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import partition_node, scan_node
from .errors import ArgumentError, DegenerateTraining, LayoutMismatch
from .schema import FeatureLayout


@dataclass(frozen=True)
class Hyperparams:
    n_trees: int = 100
    max_depth: int = 10
    seed: int = 42
    min_samples_leaf: int = 1
    mtry: int | None = None  # None means all features
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise ArgumentError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise ArgumentError("max_depth must be >= 1")
        if self.min_samples_leaf < 1:
            raise ArgumentError("min_samples_leaf must be >= 1")
        if self.mtry is not None and self.mtry < 1:
            raise ArgumentError("mtry must be >= 1 or None for all features")
        if self.seed < 0:
            raise ArgumentError("seed must be non-negative")

    def to_json_obj(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "seed": self.seed,
            "min_samples_leaf": self.min_samples_leaf,
            "mtry": self.mtry,
            "bootstrap": self.bootstrap,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Hyperparams":
        return cls(
            n_trees=int(obj["n_trees"]),
            max_depth=int(obj["max_depth"]),
            seed=int(obj["seed"]),
            min_samples_leaf=int(obj["min_samples_leaf"]),
            mtry=None if obj.get("mtry") is None else int(obj["mtry"]),
            bootstrap=bool(obj["bootstrap"]),
        )


@dataclass(frozen=True)
class Split:
    feature_index: int
    threshold: float
    impurity_decrease: float  # SSE reduction, VAS^2 units


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Nodes in depth-first preorder; feature == -1 marks a leaf."""

    feature: np.ndarray  # int32, -1 for leaves
    threshold: np.ndarray  # float64
    left: np.ndarray  # int32, -1 for leaves
    right: np.ndarray  # int32
    value: np.ndarray  # float64, leaf prediction (0.0 on internal nodes)
    n_samples: np.ndarray  # int32
    impurity_decrease: np.ndarray  # float64, 0.0 on leaves

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int32)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[i] + 1
                depths[self.right[i]] = depths[i] + 1
        return int(depths.max(initial=0))

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int32)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            cur = node[active]
            go_left = X[active, self.feature[cur]] < self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] >= 0]
        return self.value[node]


@dataclass(frozen=True)
class OutcomeStats:
    mean: float
    sd: float
    min: float
    max: float

    def to_json_obj(self) -> dict:
        return {"mean": self.mean, "sd": self.sd, "min": self.min, "max": self.max}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "OutcomeStats":
        return cls(float(obj["mean"]), float(obj["sd"]), float(obj["min"]), float(obj["max"]))


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple[DecisionTree, ...]
    hyper: Hyperparams
    feature_layout: FeatureLayout
    importances: np.ndarray  # per encoded column, sums to 1
    train_outcome_stats: OutcomeStats


def gini_impurity(class_probs) -> float:
    """1 - sum(p_i^2) for a probability vector; in [0, 1 - 1/c]."""
    p = np.asarray(class_probs, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ArgumentError("class_probs must be a nonempty 1-d vector")
    if np.any(p < 0):
        raise ArgumentError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ArgumentError("probabilities must sum to 1")
    return float(1.0 - np.sum(p * p))


def best_split(x, y, min_samples_leaf: int = 1) -> Split | None:
    """Best SSE-reducing threshold on one column, or None.

    Candidates are midpoints between consecutive distinct sorted values; ties
    break toward the smallest threshold.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ArgumentError("x and y must be equal-length 1-d arrays with >= 2 samples")
    XT = x[np.newaxis, :]
    sidx = np.argsort(XT, axis=1, kind="stable").astype(np.int32)
    rows = np.zeros(1, dtype=np.int64)
    row, _, thr, red = scan_node(XT, y, sidx, rows, min_samples_leaf)
    if row < 0:
        return None
    return Split(feature_index=0, threshold=float(thr), impurity_decrease=float(red))


class _TreeBuilder:
    """Accumulates node arrays while growing one tree depth-first."""

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []
        self.n_samples = []
        self.impurity = []

    def add(self, feature, threshold, value, n, impurity):
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        self.n_samples.append(n)
        self.impurity.append(impurity)
        return len(self.feature) - 1

    def finish(self) -> DecisionTree:
        return DecisionTree(
            feature=np.asarray(self.feature, dtype=np.int32),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int32),
            right=np.asarray(self.right, dtype=np.int32),
            value=np.asarray(self.value, dtype=np.float64),
            n_samples=np.asarray(self.n_samples, dtype=np.int32),
            impurity_decrease=np.asarray(self.impurity, dtype=np.float64),
        )


def _grow(XT: np.ndarray, y: np.ndarray, hyper: Hyperparams, rng: np.random.Generator) -> DecisionTree:
    p, n = XT.shape
    sorted0 = np.argsort(XT, axis=1, kind="stable").astype(np.int32)
    flag = np.zeros(n, dtype=np.bool_)
    all_rows = np.arange(p, dtype=np.int64)
    mtry = hyper.mtry if hyper.mtry is not None and hyper.mtry < p else None
    msl = hyper.min_samples_leaf

    builder = _TreeBuilder()
    # (sidx, depth, parent, is_left); left child pushed last so it pops first
    stack: list = [(sorted0, 0, -1, False)]
    while stack:
        sidx, depth, parent, is_left = stack.pop()
        m = sidx.shape[1]
        y_node = y[sidx[0]]
        split = None
        if depth < hyper.max_depth and m >= 2 * msl and m >= 2 and y_node.max() > y_node.min():
            if mtry is None:
                rows = all_rows
            else:
                rows = np.sort(rng.choice(p, size=mtry, replace=False)).astype(np.int64)
            row, pos, thr, red = scan_node(XT, y, sidx, rows, msl)
            if row >= 0:
                split = (int(row), int(pos), float(thr), float(red))
        if split is None:
            idx = builder.add(-1, 0.0, float(y_node.mean()), m, 0.0)
        else:
            row, pos, thr, red = split
            idx = builder.add(row, thr, 0.0, m, red)
            left_idx, right_idx = partition_node(sidx, row, pos, flag)
            stack.append((right_idx, depth + 1, idx, False))
            stack.append((left_idx, depth + 1, idx, True))
        if parent >= 0:
            if is_left:
                builder.left[parent] = idx
            else:
                builder.right[parent] = idx
    return builder.finish()


def fit_tree(X, y, hyper: Hyperparams, tree_seed) -> DecisionTree:
    """Grow one tree on (X, y); deterministic given inputs and tree_seed."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] < 1:
        raise ArgumentError("X must be (n, p) with one outcome per row")
    if hyper.mtry is not None and hyper.mtry > X.shape[1]:
        raise ArgumentError("mtry exceeds feature count")
    rng = np.random.Generator(np.random.PCG64(tree_seed))
    return _grow(np.ascontiguousarray(X.T), y, hyper, rng)


def _fit_one(XT, y, hyper, tree_index):
    ss = np.random.SeedSequence(hyper.seed, spawn_key=(tree_index,))
    rng = np.random.Generator(np.random.PCG64(ss))
    n = XT.shape[1]
    if hyper.bootstrap:
        sample = rng.integers(0, n, size=n)
        XTb = np.ascontiguousarray(XT[:, sample])
        yb = y[sample]
    else:
        XTb, yb = XT, y
    return _grow(XTb, yb, hyper, rng)


def fit_forest(X, y, layout: FeatureLayout, hyper: Hyperparams, n_jobs: int = 1) -> ForestModel:
    """Fit the seeded ensemble; output is independent of n_jobs."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] < 1:
        raise ArgumentError("X must be (n, p) with one outcome per row")
    p = X.shape[1]
    if layout.width != p:
        raise LayoutMismatch(f"layout width {layout.width} != feature count {p}")
    if hyper.mtry is not None and hyper.mtry > p:
        raise ArgumentError("mtry exceeds feature count")

    XT = np.ascontiguousarray(X.T)
    if n_jobs <= 1:
        trees = [_fit_one(XT, y, hyper, t) for t in range(hyper.n_trees)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(lambda t: _fit_one(XT, y, hyper, t), range(hyper.n_trees)))

    raw = np.zeros(p, dtype=np.float64)
    for tree in trees:
        internal = tree.feature >= 0
        if internal.any():
            raw += np.bincount(tree.feature[internal], weights=tree.impurity_decrease[internal], minlength=p)
    total = raw.sum()
    if total <= 0.0:
        raise DegenerateTraining("no tree found any split; outcome is constant")

    stats = OutcomeStats(float(y.mean()), float(y.std()), float(y.min()), float(y.max()))
    return ForestModel(
        trees=tuple(trees),
        hyper=hyper,
        feature_layout=layout,
        importances=raw / total,
        train_outcome_stats=stats,
    )


def predict(model: ForestModel, feature_vector) -> float:
    """Mean of per-tree leaf values for one encoded vector."""
    vec = np.asarray(feature_vector, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != model.feature_layout.width:
        raise LayoutMismatch(f"expected vector of width {model.feature_layout.width}")
    return float(predict_batch(model, vec[np.newaxis, :])[0])


def predict_batch(model: ForestModel, X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.feature_layout.width:
        raise LayoutMismatch(f"expected (n, {model.feature_layout.width}) matrix")
    acc = np.zeros(X.shape[0], dtype=np.float64)
    for tree in model.trees:
        acc += tree.predict(X)
    return acc / len(model.trees)


def importances(model: ForestModel) -> dict[str, float]:
    """Per-variable importance; one-hot blocks fold into their parent id."""
    owners = model.feature_layout.column_owner()
    out: dict[str, float] = {vid: 0.0 for vid, _ in model.feature_layout.entries}
    for col, vid in enumerate(owners):
        out[vid] += float(model.importances[col])
    return out

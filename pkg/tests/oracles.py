"""Independent reference implementations used to cross-check the library.

These deliberately share no code with the package: the tree oracle is a
plain recursive exhaustive search over every (feature, threshold) candidate,
and the elbow oracle applies the textbook point-to-line distance formula.
"""

from __future__ import annotations

import numpy as np


class OracleNode:
    __slots__ = ("feature", "threshold", "value", "left", "right")

    def __init__(self, feature=-1, threshold=0.0, value=0.0, left=None, right=None):
        self.feature = feature
        self.threshold = threshold
        self.value = value
        self.left = left
        self.right = right


def _sse(y: np.ndarray) -> float:
    s1 = float(np.sum(y))
    s2 = float(np.sum(y * y))
    return s2 - s1 * s1 / y.size


def oracle_best_split(X: np.ndarray, y: np.ndarray, min_samples_leaf: int):
    """Exhaustive scan of every feature and every midpoint threshold."""
    n, p = X.shape
    parent = _sse(y)
    best = None  # (reduction, threshold, feature, left_mask)
    for j in range(p):
        xs = np.unique(X[:, j])
        for a, b in zip(xs[:-1], xs[1:]):
            thr = (a + b) / 2.0
            mask = X[:, j] < thr
            nl = int(mask.sum())
            if nl < min_samples_leaf or n - nl < min_samples_leaf:
                continue
            red = parent - _sse(y[mask]) - _sse(y[~mask])
            if red <= 0.0:
                continue
            key = (-red, j, thr)
            if best is None or key < best[0]:
                best = (key, thr, j, mask)
    if best is None:
        return None
    _, thr, j, mask = best
    return j, thr, mask


def oracle_tree(X: np.ndarray, y: np.ndarray, max_depth: int, min_samples_leaf: int, depth: int = 0) -> OracleNode:
    if (
        depth >= max_depth
        or y.size < 2
        or y.size < 2 * min_samples_leaf
        or np.max(y) == np.min(y)
    ):
        return OracleNode(value=float(np.mean(y)))
    found = oracle_best_split(X, y, min_samples_leaf)
    if found is None:
        return OracleNode(value=float(np.mean(y)))
    j, thr, mask = found
    return OracleNode(
        feature=j,
        threshold=thr,
        left=oracle_tree(X[mask], y[mask], max_depth, min_samples_leaf, depth + 1),
        right=oracle_tree(X[~mask], y[~mask], max_depth, min_samples_leaf, depth + 1),
    )


def trees_equal(tree, node: OracleNode, index: int = 0, atol: float = 1e-9) -> bool:
    """Structural comparison of a packaged DecisionTree against the oracle."""
    if node.feature < 0:
        return tree.feature[index] == -1 and abs(tree.value[index] - node.value) <= atol
    if tree.feature[index] != node.feature:
        return False
    if abs(tree.threshold[index] - node.threshold) > atol:
        return False
    return trees_equal(tree, node.left, int(tree.left[index]), atol) and trees_equal(
        tree, node.right, int(tree.right[index]), atol
    )


def oracle_elbow(values) -> int:
    """Max point-to-chord distance on axis-normalized (position, value) points."""
    v = np.asarray(values, dtype=np.float64)
    m = v.size
    span = v[0] - v[-1]
    if span <= 0:
        return 1
    pts = np.column_stack([np.arange(m) / (m - 1), (v - v[-1]) / span])
    (x1, y1), (x2, y2) = pts[0], pts[-1]
    a, b, c = y2 - y1, x1 - x2, x2 * y1 - x1 * y2
    dist = np.abs(a * pts[:, 0] + b * pts[:, 1] + c) / np.hypot(a, b)
    interior = dist[1 : m - 1]
    return int(np.argmax(interior)) + 1

"""CART decision trees with Gini splits, bagged into a random forest.

Split search scans candidate features in ascending index order and, per
feature, midpoint thresholds between consecutive distinct sorted values.
Scores are compared with a strict ">", so ties resolve to the lowest
feature index and then the lowest threshold; this makes trees, and hence
forests, fully deterministic for a given seed.

Each tree owns a splitmix64 stream seeded from (master seed, tree index).
The stream is consumed in a fixed order: bootstrap draw first, then the
per-node feature subsamples in preorder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .dataframe import LabelVector
from .preprocess import FeatureMatrix
from .rng import Stream, mix_seed


@dataclass
class Leaf:
    counts: tuple[int, int]  # (class 0, class 1) samples reaching this leaf

    @property
    def fraction_positive(self) -> float:
        return self.counts[1] / (self.counts[0] + self.counts[1])


@dataclass
class Internal:
    feature: int
    threshold: float
    left: "TreeNode"   # rows with x[feature] <= threshold
    right: "TreeNode"


TreeNode = Union[Leaf, Internal]


@dataclass
class ForestConfig:
    n_trees: int = 100
    seed: int = 42
    max_features: Union[str, int] = "sqrt"  # "sqrt", "all", or a fixed count
    min_samples_split: int = 2
    max_depth: Optional[int] = None
    bootstrap: bool = True

    def candidate_count(self, n_features: int) -> int:
        if self.max_features == "sqrt":
            return min(n_features, math.ceil(math.sqrt(n_features)))
        if self.max_features == "all":
            return n_features
        k = int(self.max_features)
        if not 1 <= k <= n_features:
            raise ValueError(
                f"max_features={k} out of range for {n_features} features"
            )
        return k

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "seed": self.seed,
            "max_features": self.max_features,
            "min_samples_split": self.min_samples_split,
            "max_depth": self.max_depth,
            "bootstrap": self.bootstrap,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestConfig":
        return cls(**d)


@dataclass
class ForestModel:
    trees: list[TreeNode]
    tree_seeds: list[int]
    config: ForestConfig
    n_features: int
    feature_names: list[str]
    importances: np.ndarray = field(default=None)  # type: ignore[assignment]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "tree_seeds": self.tree_seeds,
            "trees": [_serialize_tree(t) for t in self.trees],
            "n_features": self.n_features,
            "feature_names": self.feature_names,
            "importances": self.importances.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        return cls(
            trees=[_deserialize_tree(t) for t in d["trees"]],
            tree_seeds=list(d["tree_seeds"]),
            config=ForestConfig.from_dict(d["config"]),
            n_features=int(d["n_features"]),
            feature_names=list(d["feature_names"]),
            importances=np.asarray(d["importances"], dtype=np.float64),
        )


def _serialize_tree(node: TreeNode) -> list:
    """Preorder node list; children follow their parent left-first."""
    out: list[dict] = []

    def walk(nd: TreeNode) -> None:
        if isinstance(nd, Leaf):
            out.append({"leaf": [nd.counts[0], nd.counts[1]]})
        else:
            out.append({"feature": nd.feature, "threshold": nd.threshold})
            walk(nd.left)
            walk(nd.right)

    walk(node)
    return out


def _deserialize_tree(nodes: list) -> TreeNode:
    it = iter(nodes)

    def build() -> TreeNode:
        nd = next(it)
        if "leaf" in nd:
            c = nd["leaf"]
            return Leaf((int(c[0]), int(c[1])))
        left = build()
        right = build()
        return Internal(int(nd["feature"]), float(nd["threshold"]), left, right)

    root = build()
    return root


def gini(counts: tuple[int, int]) -> float:
    """Gini impurity of a two-class count pair."""
    c0, c1 = counts
    n = c0 + c1
    if n == 0:
        raise ValueError("gini of an empty node is undefined")
    p0 = c0 / n
    p1 = c1 / n
    return 1.0 - p0 * p0 - p1 * p1


def _split_score(cl0, cl1, nl, cr0, cr1, nr):
    # Maximizing this is equivalent to maximizing the weighted Gini decrease:
    # decrease = score/n - (c0^2 + c1^2)/n^2 at the parent.
    return (cl0 * cl0 + cl1 * cl1) / nl + (cr0 * cr0 + cr1 * cr1) / nr


def best_split(
    X: np.ndarray, y: np.ndarray, candidate_features
) -> Optional[tuple[int, float, float]]:
    """Best (feature, threshold, impurity decrease) over the candidates, or None.

    Thresholds are midpoints between consecutive distinct sorted values.
    Returns None when no candidate feature has two distinct values. A best
    split with zero immediate Gini decrease is still returned (an impure
    node may need it, e.g. XOR-shaped data resolves one level deeper).
    """
    n = len(y)
    total1 = int(np.sum(y))
    total0 = n - total1
    parent_score = (total0 * total0 + total1 * total1) / n

    best_score = -np.inf
    best_feature = -1
    best_threshold = 0.0
    for f in sorted(int(f) for f in candidate_features):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        sy = y[order]
        change = np.nonzero(sv[1:] != sv[:-1])[0]
        if len(change) == 0:
            continue
        cum1 = np.cumsum(sy)
        nl = change + 1
        cl1 = cum1[change]
        cl0 = nl - cl1
        nr = n - nl
        cr1 = total1 - cl1
        cr0 = nr - cr1
        scores = (cl0 * cl0 + cl1 * cl1) / nl + (cr0 * cr0 + cr1 * cr1) / nr
        i = int(np.argmax(scores))  # first occurrence = lowest threshold
        if scores[i] > best_score:
            best_score = float(scores[i])
            best_feature = f
            best_threshold = (sv[change[i]] + sv[change[i] + 1]) / 2.0
    if best_feature < 0:
        return None
    decrease = (best_score - parent_score) / n
    return best_feature, float(best_threshold), float(decrease)


def fit_tree(
    X: np.ndarray, y: np.ndarray, config: ForestConfig, tree_seed: int,
    stream: Stream | None = None,
) -> TreeNode:
    """Grow one CART tree; feature candidates come from the tree's stream."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(y) < 1:
        raise ValueError("cannot fit a tree on zero samples")
    if stream is None:
        stream = Stream(tree_seed)
    d = X.shape[1]
    k = config.candidate_count(d)

    def grow(idx: np.ndarray, depth: int) -> TreeNode:
        ysub = y[idx]
        c1 = int(np.sum(ysub))
        counts = (len(idx) - c1, c1)
        if (
            counts[0] == 0
            or counts[1] == 0
            or len(idx) < config.min_samples_split
            or (config.max_depth is not None and depth >= config.max_depth)
        ):
            return Leaf(counts)
        feats = stream.sample_without_replacement(d, k)
        found = best_split(X[idx], ysub, feats)
        if found is None:
            return Leaf(counts)
        feature, threshold, _ = found
        mask = X[idx, feature] <= threshold
        left = grow(idx[mask], depth + 1)
        right = grow(idx[~mask], depth + 1)
        return Internal(feature, threshold, left, right)

    return grow(np.arange(len(y), dtype=np.int64), 0)


def tree_bootstrap_indices(master_seed: int, tree_index: int, n: int) -> np.ndarray:
    """The bootstrap row draw tree `tree_index` uses; exposed for verification."""
    return Stream(mix_seed(master_seed, tree_index)).integers_below(n, n)


def fit_forest(
    X: FeatureMatrix, y: LabelVector, config: ForestConfig | None = None
) -> ForestModel:
    if config is None:
        config = ForestConfig()
    n = X.rows
    if n < 2:
        raise ValueError("need at least 2 training rows")
    if n != len(y):
        raise ValueError(f"{n} rows but {len(y)} labels")
    if len(np.unique(y.values)) < 2:
        raise ValueError("training labels contain a single class")
    config.candidate_count(X.cols)  # validate Fixed(k) up front

    trees: list[TreeNode] = []
    seeds: list[int] = []
    for t in range(config.n_trees):
        tree_seed = mix_seed(config.seed, t)
        seeds.append(tree_seed)
        stream = Stream(tree_seed)
        if config.bootstrap:
            idx = stream.integers_below(n, n)
            trees.append(
                fit_tree(X.values[idx], y.values[idx], config, tree_seed, stream)
            )
        else:
            trees.append(fit_tree(X.values, y.values, config, tree_seed, stream))

    model = ForestModel(
        trees=trees,
        tree_seeds=seeds,
        config=config,
        n_features=X.cols,
        feature_names=list(X.names),
        importances=np.zeros(X.cols),
    )
    model.importances = _compute_importances(trees, X.cols)
    return model


def _node_counts(node: TreeNode) -> tuple[int, int]:
    if isinstance(node, Leaf):
        return node.counts
    l0, l1 = _node_counts(node.left)
    r0, r1 = _node_counts(node.right)
    return (l0 + r0, l1 + r1)


def _accumulate_tree_importance(node: TreeNode, total: int, acc: np.ndarray) -> tuple[int, int]:
    """Adds each internal node's weighted Gini decrease to acc; returns node counts."""
    if isinstance(node, Leaf):
        return node.counts
    lc = _accumulate_tree_importance(node.left, total, acc)
    rc = _accumulate_tree_importance(node.right, total, acc)
    counts = (lc[0] + rc[0], lc[1] + rc[1])
    n_node = counts[0] + counts[1]
    nl = lc[0] + lc[1]
    nr = rc[0] + rc[1]
    decrease = gini(counts) - (nl * gini(lc) + nr * gini(rc)) / n_node
    acc[node.feature] += (n_node / total) * decrease
    return counts


def _compute_importances(trees: list[TreeNode], n_features: int) -> np.ndarray:
    per_tree = []
    for root in trees:
        acc = np.zeros(n_features)
        counts = _node_counts(root)
        _accumulate_tree_importance(root, counts[0] + counts[1], acc)
        s = acc.sum()
        if s > 0.0:
            per_tree.append(acc / s)
    if not per_tree:
        return np.zeros(n_features)
    mean = np.mean(per_tree, axis=0)
    return mean / mean.sum()


def feature_importances(model: ForestModel) -> tuple[np.ndarray, list[str]]:
    """Aggregated mean-decrease-in-impurity importances with feature names."""
    return model.importances, model.feature_names


def top_k_importances(
    importances: np.ndarray, names: list[str], k: int = 10
) -> list[tuple[str, float]]:
    """k largest importances descending; ties break to the lower feature index."""
    if k < 1:
        raise ValueError("k must be positive")
    order = np.argsort(-np.asarray(importances), kind="stable")[:k]
    return [(names[i], float(importances[i])) for i in order]


def _tree_fraction_positive(root: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X), dtype=np.float64)
    stack = [(root, np.arange(len(X), dtype=np.int64))]
    while stack:
        node, idx = stack.pop()
        if len(idx) == 0:
            continue
        if isinstance(node, Leaf):
            out[idx] = node.fraction_positive
        else:
            mask = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[mask]))
            stack.append((node.right, idx[~mask]))
    return out


def predict_proba_forest(model: ForestModel, X: FeatureMatrix) -> np.ndarray:
    """Mean over trees of the leaf class-1 fraction, per row."""
    if X.cols != model.n_features:
        raise ValueError(
            f"matrix width {X.cols} does not match model width {model.n_features}"
        )
    acc = np.zeros(X.rows, dtype=np.float64)
    for root in model.trees:
        acc += _tree_fraction_positive(root, X.values)
    return acc / len(model.trees)


def predict_label_forest(
    model: ForestModel, X: FeatureMatrix, threshold: float = 0.5
) -> LabelVector:
    p = predict_proba_forest(model, X)
    return LabelVector((p >= threshold).astype(np.int64))

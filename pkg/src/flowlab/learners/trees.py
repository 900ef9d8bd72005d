"""CART decision trees and the random forest built on them.

Split search at each node considers the midpoints between consecutive
distinct sorted values of a seeded random subset of features (all features
when features_per_split covers them). The chosen split minimizes weighted
Gini impurity; candidates are scanned features-ascending then thresholds-
ascending and only a strict improvement replaces the incumbent, so equal
ties resolve to the lowest (feature, threshold) pair. Rows with value equal
to the threshold go left.

Trees are grown with an explicit stack (depth-first, left child first); the
per-tree generator is consulted once per node that subsamples features, in
that visit order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DimensionMismatch, EmptyTraining, FlowlabError
from ..rng import Xorshift64Star, derive_seed
from .base import TrainedModel, as_labels, as_values, check_features, names_of


@dataclass
class Leaf:
    label: int
    counts: tuple  # raw per-class sample counts at the leaf, class-ascending


@dataclass
class Split:
    feature: int
    threshold: float
    left: object = None
    right: object = None


def _best_split(values, ycode, weights, indices, features, k):
    """Lowest weighted-Gini candidate over the given features, or None.

    Returns (gini, feature, threshold). Gini for a candidate is
    (WL*GL + WR*GR) / W computed from class-weight prefix sums over the
    value-sorted rows.
    """
    sub_y = ycode[indices]
    sub_w = weights[indices]
    total_w = float(sub_w.sum())
    if total_w <= 0.0:
        return None
    best = None
    m = len(indices)
    for f in features:
        v = values[indices, f]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        cuts = np.nonzero(sv[:-1] != sv[1:])[0]
        if len(cuts) == 0:
            continue
        # class-weight prefix sums along the sorted order
        cw = np.zeros((m, k))
        cw[np.arange(m), sub_y[order]] = sub_w[order]
        cw = np.cumsum(cw, axis=0)
        wl = np.cumsum(sub_w[order])
        left = cw[cuts]
        wleft = wl[cuts]
        right = cw[-1] - left
        wright = total_w - wleft
        ok = (wleft > 0.0) & (wright > 0.0)
        l2 = np.sum(left * left, axis=1)
        r2 = np.sum(right * right, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = (wleft - l2 / wleft + wright - r2 / wright) / total_w
        g = np.where(ok, g, np.inf)
        i = int(np.argmin(g))
        if not np.isfinite(g[i]):
            continue
        thr = (sv[cuts[i]] + sv[cuts[i] + 1]) / 2.0
        if best is None or g[i] < best[0]:
            best = (float(g[i]), f, float(thr))
    return best


def tree_fit(
    X,
    y,
    max_depth: Optional[int] = None,
    min_samples_split: int = 2,
    features_per_split: Optional[int] = None,
    seed: int = 0,
    sample_weight=None,
    classes: Optional[tuple] = None,
):
    """Grow a CART tree and return its root node.

    Stops on purity, max_depth, min_samples_split, or when no candidate
    threshold exists on the sampled features. Leaf labels are the
    (weight-)majority class with ties toward the lower code. classes may be
    passed to pin the leaf count-vector layout (forests train trees on
    bootstrap samples that can miss a class).
    """
    values = as_values(X)
    labels = as_labels(y)
    n, d = values.shape
    if n == 0:
        raise EmptyTraining("tree needs at least one training row")
    if min_samples_split < 2:
        raise FlowlabError("min_samples_split must be >= 2")
    if classes is None:
        classes = tuple(sorted(set(int(v) for v in labels)))
    class_arr = np.asarray(classes, dtype=np.int64)
    ycode = np.searchsorted(class_arr, labels)
    k = len(classes)
    if sample_weight is None:
        weights = np.ones(n)
    else:
        weights = np.asarray(sample_weight, dtype=np.float64)
        if weights.shape != (n,):
            raise FlowlabError("sample_weight must have one entry per row")
        if np.any(weights < 0.0):
            raise FlowlabError("sample_weight must be nonnegative")
    if features_per_split is None or features_per_split >= d:
        features_per_split = d
    if features_per_split < 1:
        raise FlowlabError("features_per_split must be >= 1")

    rng = Xorshift64Star(seed)
    all_features = list(range(d))

    def leaf_for(indices):
        raw = np.bincount(ycode[indices], minlength=k)
        weighted = np.bincount(ycode[indices], weights=weights[indices], minlength=k)
        label = int(class_arr[int(np.argmax(weighted))])
        return Leaf(label=label, counts=tuple(int(c) for c in raw))

    root_holder = {}
    stack = [(np.arange(n), 0, root_holder, "root")]
    while stack:
        indices, depth, parent, slot = stack.pop()
        raw = np.bincount(ycode[indices], minlength=k)
        pure = int(np.count_nonzero(raw)) <= 1
        stop = (
            pure
            or (max_depth is not None and depth >= max_depth)
            or len(indices) < min_samples_split
        )
        node = None
        if not stop:
            if features_per_split == d:
                chosen = all_features
            else:
                pool = all_features.copy()
                rng.shuffle(pool)
                chosen = sorted(pool[:features_per_split])
            best = _best_split(values, ycode, weights, indices, chosen, k)
            if best is not None:
                _, f, thr = best
                mask = values[indices, f] <= thr
                node = Split(feature=f, threshold=thr)
                # push right first so the left subtree is grown first
                stack.append((indices[~mask], depth + 1, node, "right"))
                stack.append((indices[mask], depth + 1, node, "left"))
        if node is None:
            node = leaf_for(indices)
        if isinstance(parent, dict):
            parent[slot] = node
        else:
            setattr(parent, slot, node)
    return root_holder["root"]


def tree_predict(root, X) -> np.ndarray:
    """Descend by threshold comparisons; value equal to threshold goes left."""
    values = as_values(X)
    n = values.shape[0]
    out = np.empty(n, dtype=np.int64)
    stack = [(root, np.arange(n))]
    while stack:
        node, indices = stack.pop()
        if len(indices) == 0:
            continue
        if isinstance(node, Leaf):
            out[indices] = node.label
            continue
        if node.feature >= values.shape[1]:
            raise DimensionMismatch(node.feature + 1, values.shape[1])
        mask = values[indices, node.feature] <= node.threshold
        stack.append((node.left, indices[mask]))
        stack.append((node.right, indices[~mask]))
    return out


def decision_tree_fit(
    X,
    y,
    max_depth: Optional[int] = None,
    min_samples_split: int = 2,
    features_per_split: Optional[int] = None,
    seed: int = 0,
) -> TrainedModel:
    """Single CART tree wrapped as a TrainedModel."""
    values = as_values(X)
    labels = as_labels(y)
    root = tree_fit(
        values,
        labels,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
        features_per_split=features_per_split,
        seed=seed,
    )
    return TrainedModel(
        algorithm="decision_tree",
        classes=tuple(sorted(set(int(v) for v in labels))),
        feature_names=names_of(X, values.shape[1]),
        params=TreeParams(root=root),
        train_meta={
            "n_rows": values.shape[0],
            "n_features": values.shape[1],
            "hyperparameters": {
                "max_depth": max_depth,
                "min_samples_split": min_samples_split,
                "features_per_split": features_per_split,
            },
            "seed": seed,
        },
    )


class TreeParams:
    def __init__(self, root):
        self.root = root


class ForestParams:
    def __init__(self, trees: tuple, n_trees: int, bootstrap: bool, features_per_split: int, seed: int):
        self.trees = tuple(trees)
        self.n_trees = int(n_trees)
        self.bootstrap = bool(bootstrap)
        self.features_per_split = int(features_per_split)
        self.seed = int(seed)
        if len(self.trees) != self.n_trees:
            raise FlowlabError("trees length must equal n_trees")


def forest_fit(
    X,
    y,
    n_trees: int = 100,
    bootstrap: bool = True,
    features_per_split: Optional[int] = None,
    max_depth: Optional[int] = None,
    min_samples_split: int = 2,
    seed: int = 0,
) -> TrainedModel:
    """Bootstrap-aggregated CART trees.

    Each tree t draws its size-n bootstrap from stream derive_seed(seed, t, 0)
    and grows with stream derive_seed(seed, t, 1); the per-tree seeds are
    pre-derived so tree training is order-independent.
    """
    values = as_values(X)
    labels = as_labels(y)
    n, d = values.shape
    if n == 0:
        raise EmptyTraining("forest needs at least one training row")
    if n_trees < 1:
        raise FlowlabError("n_trees must be >= 1")
    if features_per_split is None:
        features_per_split = int(np.ceil(np.sqrt(d))) if d else 1
    classes = tuple(sorted(set(int(v) for v in labels)))

    trees = []
    for t in range(n_trees):
        if bootstrap:
            boot_rng = Xorshift64Star(derive_seed(seed, t, 0))
            idx = np.asarray(boot_rng.randbelow_block(n, n), dtype=np.int64)
        else:
            idx = np.arange(n)
        root = tree_fit(
            values[idx],
            labels[idx],
            max_depth=max_depth,
            min_samples_split=min_samples_split,
            features_per_split=features_per_split,
            seed=derive_seed(seed, t, 1),
            classes=classes,
        )
        trees.append(root)

    params = ForestParams(
        trees=tuple(trees),
        n_trees=n_trees,
        bootstrap=bootstrap,
        features_per_split=features_per_split,
        seed=seed,
    )
    return TrainedModel(
        algorithm="random_forest",
        classes=classes,
        feature_names=names_of(X, d),
        params=params,
        train_meta={
            "n_rows": n,
            "n_features": d,
            "hyperparameters": {
                "n_trees": n_trees,
                "bootstrap": bootstrap,
                "features_per_split": features_per_split,
                "max_depth": max_depth,
                "min_samples_split": min_samples_split,
            },
            "seed": seed,
        },
    )


def _forest_votes(model: TrainedModel, values: np.ndarray) -> np.ndarray:
    p: ForestParams = model.params
    class_arr = np.asarray(model.classes, dtype=np.int64)
    votes = np.zeros((values.shape[0], len(class_arr)), dtype=np.int64)
    for root in p.trees:
        pred = tree_predict(root, values)
        votes[np.arange(values.shape[0]), np.searchsorted(class_arr, pred)] += 1
    return votes


def forest_predict(model: TrainedModel, X) -> np.ndarray:
    """Majority vote over trees; ties resolve to the lower class code."""
    values = as_values(X)
    check_features(model, values)
    votes = _forest_votes(model, values)
    class_arr = np.asarray(model.classes, dtype=np.int64)
    return class_arr[np.argmax(votes, axis=1)]


def forest_vote_margin(model: TrainedModel, X) -> np.ndarray:
    """(top votes - runner-up votes) / n_trees per row; 1.0 when unanimous
    and there is a single class."""
    values = as_values(X)
    check_features(model, values)
    votes = _forest_votes(model, values)
    p: ForestParams = model.params
    if votes.shape[1] == 1:
        return np.ones(values.shape[0])
    part = np.sort(votes, axis=1)
    return (part[:, -1] - part[:, -2]) / float(p.n_trees)

"""Brute-force K-Nearest Neighbors.

The model stores the training matrix verbatim (lazy learner). Distances
are Euclidean; comparisons use squared distances, which preserves the
ordering. Distance ties resolve to the lower training-row index. Vote ties
resolve to the class of the nearest neighbor among the tied classes.
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptyTraining, FlowlabError
from .base import TrainedModel, as_labels, as_values, check_features, names_of

_CHUNK = 64  # query rows per distance block, keeps memory bounded


class KNNParams:
    def __init__(self, train_values: np.ndarray, train_labels: np.ndarray, k: int, requested_k: int):
        self.train_values = np.asarray(train_values, dtype=np.float64)
        self.train_labels = np.asarray(train_labels, dtype=np.int64)
        self.k = int(k)
        self.requested_k = int(requested_k)


def knn_fit(X, y, k: int = 5) -> TrainedModel:
    values = as_values(X)
    labels = as_labels(y)
    n, d = values.shape
    if n == 0:
        raise EmptyTraining("knn needs at least one training row")
    if k < 1:
        raise FlowlabError("k must be >= 1")
    classes = tuple(sorted(set(int(v) for v in labels)))
    params = KNNParams(train_values=values.copy(), train_labels=labels.copy(), k=min(k, n), requested_k=k)
    return TrainedModel(
        algorithm="knn",
        classes=classes,
        feature_names=names_of(X, d),
        params=params,
        train_meta={"n_rows": n, "n_features": d, "hyperparameters": {"k": k}, "seed": None},
    )


def _squared_distances(queries: np.ndarray, train: np.ndarray) -> np.ndarray:
    # accumulate per feature: exact same rounding for identical value sets,
    # so duplicate rows keep exactly equal distances (ties must be real)
    out = np.zeros((queries.shape[0], train.shape[0]))
    for j in range(train.shape[1]):
        diff = queries[:, j : j + 1] - train[None, :, j]
        out += diff * diff
    return out


def knn_predict(model: TrainedModel, X) -> np.ndarray:
    values = as_values(X)
    check_features(model, values)
    p: KNNParams = model.params
    train = p.train_values
    n = train.shape[0]
    k = p.k
    class_index = {c: i for i, c in enumerate(model.classes)}
    votes_of = np.asarray([class_index[int(c)] for c in p.train_labels], dtype=np.int64)
    classes = np.asarray(model.classes, dtype=np.int64)

    out = np.empty(values.shape[0], dtype=np.int64)
    for start in range(0, values.shape[0], _CHUNK):
        chunk = values[start : start + _CHUNK]
        d2 = _squared_distances(chunk, train)
        for row in range(chunk.shape[0]):
            dist = d2[row]
            if k >= n:
                candidates = np.arange(n)
            else:
                part = np.argpartition(dist, k - 1)[:k]
                kth = dist[part].max()
                candidates = np.nonzero(dist <= kth)[0]  # include boundary ties
            order = candidates[np.lexsort((candidates, dist[candidates]))][:k]
            counts = np.bincount(votes_of[order], minlength=len(classes))
            top = counts.max()
            tied = np.nonzero(counts == top)[0]
            if len(tied) == 1:
                winner = tied[0]
            else:
                tied_set = set(tied.tolist())
                winner = next(v for v in votes_of[order].tolist() if v in tied_set)
            out[start + row] = classes[winner]
    return out

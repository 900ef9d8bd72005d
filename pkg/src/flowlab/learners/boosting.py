"""Multiclass discrete AdaBoost (SAMME) over depth-1 trees.

Round weights use alpha = learning_rate * (ln((1-e)/e) + ln(K-1)) where e is
the weighted error of the round's stump; the ln(K-1) term makes the K-class
variant admissible whenever e < 1 - 1/K. Stump fitting reuses tree_fit with
sample weights (weighted Gini, weighted majority leaves). A perfect round
(e = 0) is stored with alpha capped at ln(1e10) and training stops; a round
at or beyond the 1 - 1/K barrier is discarded and training stops.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import EmptyTraining, FlowlabError, NoRounds, SingleClass
from ..rng import derive_seed
from .base import TrainedModel, as_labels, as_values, check_features, names_of
from .trees import tree_fit, tree_predict

ALPHA_CAP = math.log(1e10)


class BoostParams:
    def __init__(self, rounds: tuple, n_rounds: int, learning_rate: float):
        # rounds: (stump root, alpha) pairs; every stored alpha is positive
        self.rounds = tuple(rounds)
        self.n_rounds = int(n_rounds)
        self.learning_rate = float(learning_rate)
        if any(alpha <= 0.0 for _, alpha in self.rounds):
            raise FlowlabError("stored rounds must have positive alpha")


def adaboost_fit(X, y, n_rounds: int = 50, learning_rate: float = 1.0, seed: int = 0) -> TrainedModel:
    values = as_values(X)
    labels = as_labels(y)
    n, d = values.shape
    if n == 0:
        raise EmptyTraining("adaboost needs at least one training row")
    if n_rounds < 1:
        raise FlowlabError("n_rounds must be >= 1")
    if learning_rate <= 0.0:
        raise FlowlabError("learning_rate must be positive")
    classes = tuple(sorted(set(int(v) for v in labels)))
    k = len(classes)
    if k < 2:
        raise SingleClass("boosting needs at least two classes")

    w = np.full(n, 1.0 / n)
    rounds = []
    errors = []
    for r in range(n_rounds):
        stump = tree_fit(
            values,
            labels,
            max_depth=1,
            min_samples_split=2,
            features_per_split=d,
            seed=derive_seed(seed, r),
            sample_weight=w,
            classes=classes,
        )
        pred = tree_predict(stump, values)
        miss = pred != labels
        e = float(w[miss].sum())
        if e >= 1.0 - 1.0 / k:
            break  # no better than chance for K classes: discard and stop
        if e == 0.0:
            rounds.append((stump, ALPHA_CAP))
            errors.append(0.0)
            break
        alpha = learning_rate * (math.log((1.0 - e) / e) + math.log(k - 1))
        if alpha <= 0.0:  # unreachable given the barrier above, kept defensive
            break
        rounds.append((stump, alpha))
        errors.append(e)
        w = w * np.exp(alpha * miss)
        w = w / w.sum()

    params = BoostParams(rounds=tuple(rounds), n_rounds=n_rounds, learning_rate=learning_rate)
    return TrainedModel(
        algorithm="adaboost",
        classes=classes,
        feature_names=names_of(X, d),
        params=params,
        train_meta={
            "n_rows": n,
            "n_features": d,
            "hyperparameters": {"n_rounds": n_rounds, "learning_rate": learning_rate},
            "seed": seed,
            "rounds_trained": len(rounds),
            "weighted_errors": errors,
        },
    )


def adaboost_predict(model: TrainedModel, X) -> np.ndarray:
    """argmax over classes of the alpha-weighted stump votes, lower code on ties."""
    values = as_values(X)
    check_features(model, values)
    p: BoostParams = model.params
    if not p.rounds:
        raise NoRounds("model has no stored boosting rounds")
    class_arr = np.asarray(model.classes, dtype=np.int64)
    scores = np.zeros((values.shape[0], len(class_arr)))
    rows = np.arange(values.shape[0])
    for stump, alpha in p.rounds:
        pred = tree_predict(stump, values)
        scores[rows, np.searchsorted(class_arr, pred)] += alpha
    return class_arr[np.argmax(scores, axis=1)]

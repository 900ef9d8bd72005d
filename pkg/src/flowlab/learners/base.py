"""Shared model container and input coercion for the learner families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, FlowlabError
from ..flowdata import FeatureMatrix, LabelVector

ALGORITHMS = ("naive_bayes", "knn", "decision_tree", "random_forest", "adaboost")


@dataclass(frozen=True)
class TrainedModel:
    """Tagged union over the fitted classifier families.

    params carries the family-specific parameter object; train_meta records
    seed, hyperparameters, and row/feature counts of the fitting run.
    """

    algorithm: str
    classes: tuple
    feature_names: tuple
    params: object
    train_meta: dict

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise FlowlabError(f"unknown algorithm {self.algorithm!r}")


def as_values(X) -> np.ndarray:
    if isinstance(X, FeatureMatrix):
        return X.values
    v = np.asarray(X, dtype=np.float64)
    if v.ndim != 2:
        raise FlowlabError("expected a 2-D feature matrix")
    return v


def names_of(X, d: int) -> tuple:
    if isinstance(X, FeatureMatrix):
        return X.names
    return tuple(f"f{i}" for i in range(d))


def as_labels(y) -> np.ndarray:
    if isinstance(y, LabelVector):
        return y.values
    return np.asarray(y, dtype=np.int64)


def check_features(model: TrainedModel, values: np.ndarray) -> None:
    if values.shape[1] != len(model.feature_names):
        raise DimensionMismatch(len(model.feature_names), values.shape[1])

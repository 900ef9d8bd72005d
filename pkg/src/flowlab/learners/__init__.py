"""Four from-scratch classifier families behind one fit/predict contract."""

from __future__ import annotations

import numpy as np

from ..errors import FlowlabError
from .base import TrainedModel, as_values, check_features
from .bayes import NaiveBayesParams, nb_fit, nb_predict
from .boosting import BoostParams, adaboost_fit, adaboost_predict
from .neighbors import KNNParams, knn_fit, knn_predict
from .persist import FORMAT_VERSION, dumps_json_17g, load_model, save_model
from .scaling import Scaler, apply_scaler, fit_scaler, load_scaler, save_scaler
from .trees import (
    ForestParams,
    Leaf,
    Split,
    TreeParams,
    decision_tree_fit,
    forest_fit,
    forest_predict,
    forest_vote_margin,
    tree_fit,
    tree_predict,
)

__all__ = [
    "TrainedModel",
    "NaiveBayesParams",
    "KNNParams",
    "TreeParams",
    "ForestParams",
    "BoostParams",
    "Leaf",
    "Split",
    "Scaler",
    "nb_fit",
    "nb_predict",
    "knn_fit",
    "knn_predict",
    "tree_fit",
    "tree_predict",
    "decision_tree_fit",
    "forest_fit",
    "forest_predict",
    "forest_vote_margin",
    "adaboost_fit",
    "adaboost_predict",
    "fit_scaler",
    "apply_scaler",
    "save_scaler",
    "load_scaler",
    "save_model",
    "load_model",
    "dumps_json_17g",
    "FORMAT_VERSION",
    "fit_family",
    "predict",
    "FAMILIES",
]

# CLI-facing short names in canonical training order
FAMILIES = ("nb", "knn", "rf", "ada")


def fit_family(name: str, X, y, seed: int = 0, hyper: dict = None) -> TrainedModel:
    """Train one family by short name with a hyperparameter dict."""
    hp = dict(hyper or {})
    if name == "nb":
        return nb_fit(X, y)
    if name == "knn":
        return knn_fit(X, y, k=int(hp.get("k", 5)))
    if name == "rf":
        return forest_fit(
            X,
            y,
            n_trees=int(hp.get("n_trees", 100)),
            bootstrap=bool(hp.get("bootstrap", True)),
            features_per_split=hp.get("features_per_split"),
            max_depth=hp.get("max_depth"),
            min_samples_split=int(hp.get("min_samples_split", 2)),
            seed=seed,
        )
    if name == "ada":
        return adaboost_fit(
            X,
            y,
            n_rounds=int(hp.get("n_rounds", 50)),
            learning_rate=float(hp.get("learning_rate", 1.0)),
            seed=seed,
        )
    if name == "tree":
        return decision_tree_fit(
            X,
            y,
            max_depth=hp.get("max_depth"),
            min_samples_split=int(hp.get("min_samples_split", 2)),
            features_per_split=hp.get("features_per_split"),
            seed=seed,
        )
    raise FlowlabError(f"unknown model family {name!r}")


def predict(model: TrainedModel, X) -> np.ndarray:
    """Predicted labels for any trained family."""
    values = as_values(X)
    check_features(model, values)
    if model.algorithm == "naive_bayes":
        labels, _ = nb_predict(model, values)
        return labels
    if model.algorithm == "knn":
        return knn_predict(model, values)
    if model.algorithm == "decision_tree":
        return tree_predict(model.params.root, values)
    if model.algorithm == "random_forest":
        return forest_predict(model, values)
    if model.algorithm == "adaboost":
        return adaboost_predict(model, values)
    raise FlowlabError(f"unknown algorithm {model.algorithm!r}")

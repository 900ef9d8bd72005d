"""Gaussian Naive Bayes with log-space posteriors.

Class priors are empirical frequencies; per-class, per-feature means and
variances use population (1/n) normalization. Variances are floored at
eps = 1e-9 times the largest per-feature variance over the whole training
set (or 1e-9 if every feature is constant), which keeps label-encoded
integer columns from producing zero-variance singularities.
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptyTraining
from .base import TrainedModel, as_labels, as_values, check_features, names_of


def nb_fit(X, y) -> TrainedModel:
    values = as_values(X)
    labels = as_labels(y)
    n, d = values.shape
    if n == 0:
        raise EmptyTraining("naive bayes needs at least one training row")
    classes = tuple(sorted(set(int(v) for v in labels)))
    k = len(classes)

    global_var = values.var(axis=0)
    top = float(global_var.max()) if d else 0.0
    eps = 1e-9 * top if top > 0.0 else 1e-9

    priors = np.empty(k)
    means = np.empty((k, d))
    variances = np.empty((k, d))
    for i, c in enumerate(classes):
        rows = values[labels == c]
        priors[i] = rows.shape[0] / n
        means[i] = rows.mean(axis=0)
        variances[i] = np.maximum(rows.var(axis=0), eps)

    params = NaiveBayesParams(priors=priors, means=means, variances=variances)
    return TrainedModel(
        algorithm="naive_bayes",
        classes=classes,
        feature_names=names_of(X, d),
        params=params,
        train_meta={"n_rows": n, "n_features": d, "hyperparameters": {}, "seed": None},
    )


class NaiveBayesParams:
    def __init__(self, priors: np.ndarray, means: np.ndarray, variances: np.ndarray):
        self.priors = np.asarray(priors, dtype=np.float64)
        self.means = np.asarray(means, dtype=np.float64)
        self.variances = np.asarray(variances, dtype=np.float64)
        if np.any(self.variances <= 0.0):
            raise ValueError("all variances must be positive")


def nb_predict(model: TrainedModel, X):
    """Labels and normalized posteriors.

    Joint densities are evaluated in log space and normalized with the
    log-sum-exp trick; argmax ties resolve to the lower class code.
    """
    values = as_values(X)
    check_features(model, values)
    p: NaiveBayesParams = model.params
    log_prior = np.log(p.priors)
    # (n, k): sum over features of the Gaussian log density
    ll = np.empty((values.shape[0], len(model.classes)))
    for i in range(len(model.classes)):
        var = p.variances[i]
        diff = values - p.means[i]
        ll[:, i] = log_prior[i] - 0.5 * np.sum(np.log(2.0 * np.pi * var) + diff * diff / var, axis=1)
    peak = ll.max(axis=1, keepdims=True)
    norm = peak + np.log(np.exp(ll - peak).sum(axis=1, keepdims=True))
    posteriors = np.exp(ll - norm)
    labels = np.asarray(model.classes, dtype=np.int64)[np.argmax(ll, axis=1)]
    return labels, posteriors

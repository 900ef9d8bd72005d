"""Optional standardization, fitted on training data only.

Off by default everywhere; the pipeline applies it only under the scale
option. Constant columns get std 1 so they pass through centered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..flowdata import FeatureMatrix
from .base import as_values


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray


def fit_scaler(X) -> Scaler:
    values = as_values(X)
    mean = values.mean(axis=0) if values.shape[0] else np.zeros(values.shape[1])
    std = values.std(axis=0) if values.shape[0] else np.ones(values.shape[1])
    std = np.where(std == 0.0, 1.0, std)
    return Scaler(mean=mean, std=std)


def apply_scaler(scaler: Scaler, X):
    values = as_values(X)
    scaled = (values - scaler.mean) / scaler.std
    if isinstance(X, FeatureMatrix):
        return FeatureMatrix(names=X.names, values=scaled)
    return scaled


def save_scaler(scaler: Scaler, path) -> None:
    doc = {"mean": [float(v) for v in scaler.mean], "std": [float(v) for v in scaler.std]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_scaler(path) -> Scaler:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return Scaler(mean=np.asarray(doc["mean"]), std=np.asarray(doc["std"]))

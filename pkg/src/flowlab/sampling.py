"""Stratified train/test splitting and SMOTE oversampling.

Both operations draw from the documented xorshift64* streams: the split
uses derive_seed(seed, LANE_SPLIT) and SMOTE uses derive_seed(seed,
LANE_SMOTE), so a root seed fixes both results bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EmptyLabels, FlowlabError
from .flowdata import FeatureMatrix, LabelVector
from .rng import Xorshift64Star, derive_seed

LANE_SPLIT = 0x53504C
LANE_SMOTE = 0x534D4F


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SplitIndices:
    train: tuple
    test: tuple
    seed: int
    test_fraction: float


def stratified_split(y: Union[LabelVector, np.ndarray], test_fraction: float, seed: int) -> SplitIndices:
    """Seeded stratified partition of row indices.

    Within each class (ascending class order) the row indices are shuffled
    by the seeded generator and the first round(count * fraction) go to
    test; rounding is half-up. Identical seed implies identical split.
    """
    values = y.values if isinstance(y, LabelVector) else np.asarray(y)
    n = len(values)
    if n == 0:
        raise EmptyLabels("cannot split an empty label vector")
    if not (0.0 <= test_fraction < 1.0):
        raise FlowlabError("test_fraction must be in [0, 1)")
    rng = Xorshift64Star(derive_seed(seed, LANE_SPLIT))
    train, test = [], []
    for c in sorted(set(int(v) for v in values)):
        members = [int(i) for i in np.nonzero(values == c)[0]]
        rng.shuffle(members)
        k = _round_half_up(len(members) * test_fraction)
        test.extend(members[:k])
        train.extend(members[k:])
    return SplitIndices(
        train=tuple(sorted(train)),
        test=tuple(sorted(test)),
        seed=seed,
        test_fraction=test_fraction,
    )


def save_split(split: SplitIndices, path) -> None:
    doc = {
        "seed": split.seed,
        "test_fraction": split.test_fraction,
        "train": list(split.train),
        "test": list(split.test),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_split(path) -> SplitIndices:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return SplitIndices(
        train=tuple(int(i) for i in doc["train"]),
        test=tuple(int(i) for i in doc["test"]),
        seed=int(doc["seed"]),
        test_fraction=float(doc["test_fraction"]),
    )


@dataclass(frozen=True)
class ResampledSet:
    X: FeatureMatrix
    y: LabelVector
    synthetic_from: tuple  # (base row index, neighbor row index) per synthetic row
    seed: int
    single_class: bool = False  # set when there was nothing to balance


def smote(X: FeatureMatrix, y: LabelVector, k: int = 5, seed: int = 0) -> ResampledSet:
    """Oversample every minority class up to the majority count.

    Each synthetic row is base + u * (neighbor - base) where base is drawn
    uniformly from the class, neighbor is one of its k nearest same-class
    neighbors (Euclidean; k clipped to class_size - 1), and u is uniform in
    [0, 1). A singleton class is duplicated verbatim. Originals are
    preserved unchanged as a prefix of the output; synthetic rows follow in
    ascending class order. Per synthetic row the generator is consulted in
    a fixed order: base draw, neighbor draw, u draw.

    A single-class input has nothing to balance: the input is returned
    unchanged with the single_class warning flag set.
    """
    if k < 1:
        raise FlowlabError("k must be >= 1")
    values = X.values
    labels = y.values
    if len(labels) != values.shape[0]:
        raise FlowlabError("X and y disagree on the number of rows")
    if len(labels) == 0:
        raise EmptyLabels("cannot resample an empty training set")
    classes = sorted(set(int(v) for v in labels))
    if len(classes) == 1:
        return ResampledSet(X=X, y=y, synthetic_from=(), seed=seed, single_class=True)

    rng = Xorshift64Star(derive_seed(seed, LANE_SMOTE))
    counts = {c: int(np.sum(labels == c)) for c in classes}
    majority = max(counts.values())
    new_rows = []
    new_labels = []
    origin = []
    for c in classes:
        need = majority - counts[c]
        if need == 0:
            continue
        members = np.nonzero(labels == c)[0]
        rows = values[members]
        m = len(members)
        if m == 1:
            # forced by the k-clipping rule: duplicate the lone point
            # verbatim; no generator draws are consumed
            for _ in range(need):
                new_rows.append(rows[0].copy())
                new_labels.append(c)
                origin.append((int(members[0]), int(members[0])))
            continue
        neighbor_cache: dict = {}
        for _ in range(need):
            b = rng.randbelow(m)
            if b not in neighbor_cache:
                d2 = np.sum((rows - rows[b]) ** 2, axis=1)
                order = np.lexsort((np.arange(m), d2))
                order = order[order != b]  # a row is not its own neighbor
                neighbor_cache[b] = order[: min(k, m - 1)]
            nearest = neighbor_cache[b]
            j = nearest[rng.randbelow(len(nearest))]
            u = rng.uniform()
            new_rows.append(rows[b] + u * (rows[j] - rows[b]))
            new_labels.append(c)
            origin.append((int(members[b]), int(members[j])))

    if new_rows:
        out_values = np.vstack([values, np.asarray(new_rows)])
        out_labels = np.concatenate([labels, np.asarray(new_labels, dtype=np.int64)])
    else:
        out_values = values
        out_labels = labels
    return ResampledSet(
        X=FeatureMatrix(names=X.names, values=out_values),
        y=LabelVector(values=out_labels, semantics=y.semantics),
        synthetic_from=tuple(origin),
        seed=seed,
    )

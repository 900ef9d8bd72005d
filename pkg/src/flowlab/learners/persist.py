"""Versioned JSON model files.

Layout: {"version": 1, "algorithm": ..., "classes": [...],
"feature_names": [...], "train_meta": {...}, "params": {...}} with trees
serialized as nested leaf/split nodes. Every real is written as decimal
with 17 significant digits ('%.17g'), which round-trips float64 exactly, so
a loaded model predicts bit-identically to the saved one. Unsupported
versions raise VersionMismatch; anything structurally wrong raises
CorruptModel.
"""

from __future__ import annotations

import json
import math

import numpy as np

from ..errors import CorruptModel, FlowlabError, VersionMismatch
from .base import TrainedModel
from .bayes import NaiveBayesParams
from .boosting import BoostParams
from .neighbors import KNNParams
from .trees import ForestParams, Leaf, Split, TreeParams

FORMAT_VERSION = 1


class _Raw(str):
    """Pre-rendered JSON fragment used by the iterative writer."""


def dumps_json_17g(obj) -> str:
    """Serialize to JSON, formatting floats with 17 significant digits.

    Iterative (stack-based) so arbitrarily deep trees cannot overflow the
    interpreter recursion limit.
    """
    parts = []
    stack = [obj]
    while stack:
        o = stack.pop()
        if isinstance(o, _Raw):
            parts.append(str(o))
        elif o is None:
            parts.append("null")
        elif isinstance(o, bool):
            parts.append("true" if o else "false")
        elif isinstance(o, (int, np.integer)):
            parts.append(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            f = float(o)
            if not math.isfinite(f):
                raise FlowlabError("cannot serialize a non-finite real")
            parts.append(format(f, ".17g"))
        elif isinstance(o, str):
            parts.append(json.dumps(o))
        elif isinstance(o, dict):
            tokens = [_Raw("{")]
            for i, (key, value) in enumerate(o.items()):
                if i:
                    tokens.append(_Raw(","))
                tokens.append(_Raw(json.dumps(str(key)) + ":"))
                tokens.append(value)
            tokens.append(_Raw("}"))
            stack.extend(reversed(tokens))
        elif isinstance(o, (list, tuple, np.ndarray)):
            tokens = [_Raw("[")]
            for i, value in enumerate(list(o)):
                if i:
                    tokens.append(_Raw(","))
                tokens.append(value)
            tokens.append(_Raw("]"))
            stack.extend(reversed(tokens))
        else:
            raise FlowlabError(f"cannot serialize {type(o).__name__}")
    return "".join(parts)


def _node_to_doc(root):
    holder = {}
    stack = [(root, holder, "root")]
    while stack:
        node, parent, slot = stack.pop()
        if isinstance(node, Leaf):
            doc = {"leaf": {"label": node.label, "counts": list(node.counts)}}
        elif isinstance(node, Split):
            inner = {"feature": node.feature, "threshold": node.threshold, "left": None, "right": None}
            doc = {"split": inner}
            stack.append((node.left, inner, "left"))
            stack.append((node.right, inner, "right"))
        else:
            raise FlowlabError(f"not a tree node: {type(node).__name__}")
        parent[slot] = doc
    return holder["root"]


def _node_from_doc(doc):
    holder = {}
    stack = [(doc, holder, "root")]
    while stack:
        d, parent, slot = stack.pop()
        if not isinstance(d, dict):
            raise CorruptModel("tree node is not an object")
        if "leaf" in d:
            body = d["leaf"]
            node = Leaf(label=int(body["label"]), counts=tuple(int(c) for c in body["counts"]))
        elif "split" in d:
            body = d["split"]
            node = Split(feature=int(body["feature"]), threshold=float(body["threshold"]))
            stack.append((body["left"], node, "left"))
            stack.append((body["right"], node, "right"))
        else:
            raise CorruptModel("tree node is neither leaf nor split")
        if isinstance(parent, dict):
            parent[slot] = node
        else:
            setattr(parent, slot, node)
    return holder["root"]


def _params_to_doc(model: TrainedModel) -> dict:
    p = model.params
    if model.algorithm == "naive_bayes":
        return {
            "priors": p.priors.tolist(),
            "means": p.means.tolist(),
            "variances": p.variances.tolist(),
        }
    if model.algorithm == "knn":
        return {
            "k": p.k,
            "requested_k": p.requested_k,
            "train_values": p.train_values.tolist(),
            "train_labels": p.train_labels.tolist(),
        }
    if model.algorithm == "decision_tree":
        return {"root": _node_to_doc(p.root)}
    if model.algorithm == "random_forest":
        return {
            "n_trees": p.n_trees,
            "bootstrap": p.bootstrap,
            "features_per_split": p.features_per_split,
            "seed": p.seed,
            "trees": [_node_to_doc(t) for t in p.trees],
        }
    if model.algorithm == "adaboost":
        return {
            "n_rounds": p.n_rounds,
            "learning_rate": p.learning_rate,
            "rounds": [{"alpha": alpha, "stump": _node_to_doc(stump)} for stump, alpha in p.rounds],
        }
    raise FlowlabError(f"unknown algorithm {model.algorithm!r}")


def _params_from_doc(algorithm: str, doc: dict):
    if algorithm == "naive_bayes":
        return NaiveBayesParams(
            priors=np.asarray(doc["priors"], dtype=np.float64),
            means=np.asarray(doc["means"], dtype=np.float64),
            variances=np.asarray(doc["variances"], dtype=np.float64),
        )
    if algorithm == "knn":
        return KNNParams(
            train_values=np.asarray(doc["train_values"], dtype=np.float64),
            train_labels=np.asarray(doc["train_labels"], dtype=np.int64),
            k=int(doc["k"]),
            requested_k=int(doc["requested_k"]),
        )
    if algorithm == "decision_tree":
        return TreeParams(root=_node_from_doc(doc["root"]))
    if algorithm == "random_forest":
        return ForestParams(
            trees=tuple(_node_from_doc(t) for t in doc["trees"]),
            n_trees=int(doc["n_trees"]),
            bootstrap=bool(doc["bootstrap"]),
            features_per_split=int(doc["features_per_split"]),
            seed=int(doc["seed"]),
        )
    if algorithm == "adaboost":
        return BoostParams(
            rounds=tuple((_node_from_doc(r["stump"]), float(r["alpha"])) for r in doc["rounds"]),
            n_rounds=int(doc["n_rounds"]),
            learning_rate=float(doc["learning_rate"]),
        )
    raise CorruptModel(f"unknown algorithm {algorithm!r}")


def save_model(model: TrainedModel, path) -> None:
    doc = {
        "version": FORMAT_VERSION,
        "algorithm": model.algorithm,
        "classes": list(model.classes),
        "feature_names": list(model.feature_names),
        "train_meta": model.train_meta,
        "params": _params_to_doc(model),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json_17g(doc))
        fh.write("\n")


def load_model(path) -> TrainedModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptModel(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or "version" not in doc:
        raise CorruptModel(f"{path}: missing version field")
    if doc["version"] != FORMAT_VERSION:
        raise VersionMismatch(found=doc["version"], supported=(FORMAT_VERSION,))
    try:
        algorithm = str(doc["algorithm"])
        model = TrainedModel(
            algorithm=algorithm,
            classes=tuple(int(c) for c in doc["classes"]),
            feature_names=tuple(str(n) for n in doc["feature_names"]),
            params=_params_from_doc(algorithm, doc["params"]),
            train_meta=dict(doc["train_meta"]),
        )
    except CorruptModel:
        raise
    except (KeyError, TypeError, ValueError, FlowlabError) as exc:
        raise CorruptModel(f"{path}: malformed model document ({exc})") from None
    return model

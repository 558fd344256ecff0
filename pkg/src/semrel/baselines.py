"""Distributional baselines: linear classifiers over word-vector pairs.

Three feature schemes are supported for a pair (x, y) with vectors vx, vy:

  concat  [vx ; vy]
  diff    vy is subtracted from vx
  asym    [d ; d*d] where d = vx - vy, squaring elementwise

A one-vs-rest linear classifier with hinge loss is trained by seeded
subgradient descent, with optional L1 or L2 regularization. The baseline
counterpart of the full pipeline gates pairs on raw cosine similarity (a
threshold tuned for related-class F1) before applying the linear model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingTable
from .errors import DataError
from .pairs import PairRecord, RELATED
from .relatedness import T_GRID, _binary_f1, cosine_norm

LINEAR_FORMAT = "semrel-linear"
LINEAR_VERSION = 1

VECTOR_COMBINATIONS = ("concat", "diff", "asym")
REGULARIZERS = (None, "l1", "l2")


def combine_vectors(vx: np.ndarray, vy: np.ndarray, method: str = "concat") -> np.ndarray:
    vx = np.asarray(vx, dtype=float)
    vy = np.asarray(vy, dtype=float)
    if method == "concat":
        return np.concatenate([vx, vy])
    if method == "diff":
        return vx - vy
    if method == "asym":
        d = vx - vy
        return np.concatenate([d, d * d])
    raise ValueError(f"method must be one of {VECTOR_COMBINATIONS}")


@dataclass
class LinearModel:
    labels: tuple[str, ...]
    weights: np.ndarray  # one row per label
    bias: np.ndarray
    method: str = "concat"

    def decision_values(self, features: np.ndarray) -> np.ndarray:
        return self.weights @ np.asarray(features, dtype=float) + self.bias


def features_for_pairs(
    records: Sequence[PairRecord], table: EmbeddingTable, method: str = "concat"
) -> np.ndarray:
    return np.stack(
        [combine_vectors(table.lookup(r.x), table.lookup(r.y), method) for r in records]
    )


def train_linear(
    records: Sequence[PairRecord],
    table: EmbeddingTable,
    method: str = "concat",
    epochs: int = 10,
    learning_rate: float = 0.1,
    regularizer: str | None = None,
    strength: float = 0.0,
    seed: int = 13,
    label_set: Sequence[str] | None = None,
) -> LinearModel:
    """One-vs-rest hinge loss by per-example subgradient descent.

    L2 shrinks weights multiplicatively before each update; L1 applies
    soft-thresholding after it, so large strengths drive weights exactly to
    zero instead of oscillating around it. ``strength`` zero (the default)
    leaves both branches untouched and matches unregularized training bitwise.
    """
    if not records:
        raise DataError("training set is empty")
    if method not in VECTOR_COMBINATIONS:
        raise ValueError(f"method must be one of {VECTOR_COMBINATIONS}")
    if regularizer not in REGULARIZERS:
        raise ValueError(f"regularizer must be one of {REGULARIZERS}")
    if strength < 0.0:
        raise ValueError("strength must be nonnegative")
    labels = tuple(label_set) if label_set is not None else tuple(sorted({r.label for r in records}))
    stray = sorted({r.label for r in records} - set(labels))
    if stray:
        raise DataError(f"training labels outside the label set: {', '.join(stray)}")
    features = features_for_pairs(records, table, method)
    gold = np.array([labels.index(r.label) for r in records])
    n_labels = len(labels)
    dim = features.shape[1]
    weights = np.zeros((n_labels, dim))
    bias = np.zeros(n_labels)
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        for i in rng.permutation(len(records)):
            f = features[i]
            targets = np.where(np.arange(n_labels) == gold[i], 1.0, -1.0)
            margins = targets * (weights @ f + bias)
            active = margins < 1.0
            if regularizer == "l2" and strength > 0.0:
                weights *= max(0.0, 1.0 - learning_rate * strength)
            if active.any():
                step = learning_rate * (targets * active)
                weights += np.outer(step, f)
                bias += step
            if regularizer == "l1" and strength > 0.0:
                cut = learning_rate * strength
                weights = np.sign(weights) * np.maximum(np.abs(weights) - cut, 0.0)
    return LinearModel(labels=labels, weights=weights, bias=bias, method=method)


def predict_linear(model: LinearModel, table: EmbeddingTable, x: str, y: str) -> str:
    features = combine_vectors(table.lookup(x), table.lookup(y), model.method)
    return model.labels[int(np.argmax(model.decision_values(features)))]


def tune_cosine_threshold(val: Sequence[PairRecord], table: EmbeddingTable) -> tuple[float, float]:
    """Best related-class F1 threshold on normalized cosine; ties take the smaller t."""
    if not val:
        raise DataError("validation set is empty")
    gold = [r.label == RELATED for r in val]
    if all(gold) or not any(gold):
        raise DataError("validation set must contain both RELATED and UNRELATED pairs")
    scores = np.array([cosine_norm(table.lookup(r.x), table.lookup(r.y)) for r in val])
    best_t, best_f1 = 0.0, -1.0
    for t in T_GRID:
        f1 = _binary_f1(gold, [s >= t for s in scores])
        if f1 > best_f1:
            best_t, best_f1 = t, f1
    return best_t, best_f1


def baseline_classify(
    model: LinearModel,
    table: EmbeddingTable,
    threshold: float,
    x: str,
    y: str,
    negative_label: str,
) -> str:
    """Cosine gate plus linear classifier: the baseline twin of the pipeline."""
    if cosine_norm(table.lookup(x), table.lookup(y)) < threshold:
        return negative_label
    return predict_linear(model, table, x, y)


def baseline_predict(
    model: LinearModel,
    table: EmbeddingTable,
    threshold: float,
    pairs: Sequence[PairRecord],
    negative_label: str,
) -> list[str]:
    return [baseline_classify(model, table, threshold, r.x, r.y, negative_label) for r in pairs]


def save_linear(model: LinearModel, destination) -> None:
    doc = {
        "format": LINEAR_FORMAT,
        "version": LINEAR_VERSION,
        "labels": list(model.labels),
        "method": model.method,
        "weights": model.weights.tolist(),
        "bias": model.bias.tolist(),
    }
    text = json.dumps(doc, indent=1)
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        destination.write(text + "\n")


def load_linear(source) -> LinearModel:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    if not isinstance(doc, dict) or doc.get("format") != LINEAR_FORMAT:
        raise DataError("not a linear model file")
    if doc.get("version") != LINEAR_VERSION:
        raise DataError(f"unsupported linear model version {doc.get('version')!r}")
    return LinearModel(
        labels=tuple(doc["labels"]),
        weights=np.array(doc["weights"], dtype=float),
        bias=np.array(doc["bias"], dtype=float),
        method=doc.get("method", "concat"),
    )

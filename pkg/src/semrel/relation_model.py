"""The integrated pair classifier.

A word pair is represented as the concatenation [vector of x ; averaged path
vector ; vector of y]. A softmax output layer, optionally preceded by one tanh
hidden layer, turns that into a distribution over the label set. Training is
per-example stochastic gradient descent on the mean cross-entropy, with
gradients backpropagated through the classifier, the path average, the
recurrent unit, and the edge-component embeddings. Word vectors for x and y
are frozen table lookups unless ``train_word_vectors`` is switched on, in
which case the model keeps its own trainable copies for the training-set
terms.

All randomness (initialization, example order, word dropout) flows from the
single seed in TrainConfig, so a fixed seed reproduces parameters bit for bit.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import DependencyPath, PathIndex
from .embeddings import EmbeddingTable
from .errors import DataError
from .pairs import PairRecord
from .path_encoder import (
    AVERAGE_MODES,
    INIT_SCALE,
    WEIGHTED,
    ComponentEmbeddings,
    EdgeVocab,
    EncoderGrads,
    RecurrentParams,
    average_paths_with_cache,
    backprop_average,
    build_edge_vocab,
    init_recurrent,
)

logger = logging.getLogger(__name__)

MODEL_FORMAT = "semrel-relation-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters; everything trainable is reproducible from ``seed``."""

    hidden_layers: int = 0
    word_dropout_rate: float = 0.0
    epochs: int = 1
    learning_rate: float = 0.1
    seed: int = 13
    hidden_dim: int = 60
    mlp_hidden_dim: int = 60
    lemma_dim: int | None = None
    pos_dim: int = 4
    deprel_dim: int = 5
    dir_dim: int = 1
    path_average: str = WEIGHTED
    train_word_vectors: bool = False

    def __post_init__(self):
        if self.hidden_layers not in (0, 1):
            raise ValueError("hidden_layers must be 0 or 1")
        if not 0.0 <= self.word_dropout_rate < 1.0:
            raise ValueError("word_dropout_rate must lie in [0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.path_average not in AVERAGE_MODES:
            raise ValueError(f"unknown path_average mode {self.path_average!r}")
        for name in ("hidden_dim", "mlp_hidden_dim", "pos_dim", "deprel_dim", "dir_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.lemma_dim is not None and self.lemma_dim < 1:
            raise ValueError("lemma_dim must be positive")


# Epoch presets for the two tasks; other fields keep their defaults.
RELATEDNESS_PRESET = TrainConfig(hidden_layers=0, word_dropout_rate=0.0, epochs=3)
RELATIONS_PRESET = TrainConfig(hidden_layers=0, word_dropout_rate=0.0, epochs=5)


@dataclass
class TrainableWordVectors:
    """Model-owned word vectors, used instead of the table when present."""

    index: dict[str, int]
    matrix: np.ndarray

    def row(self, token: str) -> int | None:
        return self.index.get(token.lower())


@dataclass
class ModelParams:
    vocab: EdgeVocab
    rec: RecurrentParams
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray | None
    b2: np.ndarray | None
    label_set: tuple[str, ...]
    word_dim: int
    path_average: str = WEIGHTED
    word_vectors: TrainableWordVectors | None = None
    seed: int | None = None

    @property
    def hidden_layers(self) -> int:
        return 0 if self.w2 is None else 1

    @property
    def hidden_size(self) -> int:
        return self.rec.hidden_size

    @property
    def feature_width(self) -> int:
        return 2 * self.word_dim + self.hidden_size

    def label_index(self, label: str) -> int:
        try:
            return self.label_set.index(label)
        except ValueError:
            raise DataError(f"label {label!r} not in model label set {self.label_set}") from None

    def word_vector(self, token: str, table: EmbeddingTable) -> np.ndarray:
        if self.word_vectors is not None:
            row = self.word_vectors.row(token)
            if row is not None:
                return self.word_vectors.matrix[row]
        return table.lookup(token)


@dataclass(frozen=True)
class ClassDistribution:
    """Softmax scores aligned with the model's label set."""

    labels: tuple[str, ...]
    scores: np.ndarray

    def score(self, label: str) -> float:
        try:
            return float(self.scores[self.labels.index(label)])
        except ValueError:
            raise DataError(f"label {label!r} not in {self.labels}") from None


@dataclass
class Example:
    """A pair with its path multiset, ready for scoring or training."""

    x: str
    y: str
    paths: Mapping[DependencyPath, int]
    label: str | None = None


def featurize(x: str, y: str, v_paths: np.ndarray, table: EmbeddingTable) -> np.ndarray:
    """[vector of x ; path vector ; vector of y], in that order."""
    return np.concatenate([table.lookup(x), np.asarray(v_paths, dtype=float), table.lookup(y)])


def forward(v_xy: np.ndarray, params: ModelParams, hidden_layers: int | None = None) -> ClassDistribution:
    """Class distribution for one feature vector.

    Softmax is computed after subtracting the maximum logit, so adding any
    constant to the logits leaves the distribution unchanged.
    """
    if hidden_layers is not None and hidden_layers != params.hidden_layers:
        raise ValueError(
            f"hidden_layers={hidden_layers} does not match the parameters ({params.hidden_layers})"
        )
    v = np.asarray(v_xy, dtype=float)
    if v.shape != (params.w1.shape[1],):
        raise ValueError(f"feature vector has shape {v.shape}, expected ({params.w1.shape[1]},)")
    logits = _logits(v, params)
    return ClassDistribution(params.label_set, _softmax(logits))


def predict(dist: ClassDistribution) -> str:
    """Label with the highest score; exact ties go to the lowest index."""
    return dist.labels[int(np.argmax(dist.scores))]


def pair_distribution(params: ModelParams, table: EmbeddingTable, index: PathIndex, x: str, y: str) -> ClassDistribution:
    """Forward pass for a pair straight from the path index and word table."""
    v_paths, _ = average_paths_with_cache(index.get(x, y), params.vocab, params.rec, params.path_average)
    v = np.concatenate([params.word_vector(x, table), v_paths, params.word_vector(y, table)])
    return forward(v, params)


def _logits(v: np.ndarray, params: ModelParams) -> np.ndarray:
    a = params.w1 @ v + params.b1
    if params.w2 is None:
        return a
    return params.w2 @ np.tanh(a) + params.b2


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


@dataclass
class ModelGrads:
    """Gradient accumulators mirroring every trainable array in ModelParams."""

    encoder: EncoderGrads
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray | None
    b2: np.ndarray | None
    word_vectors: np.ndarray | None

    @classmethod
    def zeros(cls, params: ModelParams) -> "ModelGrads":
        return cls(
            encoder=EncoderGrads.zeros(params.vocab, params.rec),
            w1=np.zeros_like(params.w1),
            b1=np.zeros_like(params.b1),
            w2=None if params.w2 is None else np.zeros_like(params.w2),
            b2=None if params.b2 is None else np.zeros_like(params.b2),
            word_vectors=None
            if params.word_vectors is None
            else np.zeros_like(params.word_vectors.matrix),
        )


def trainable_arrays(params: ModelParams) -> list[tuple[str, np.ndarray]]:
    """Named views of every trainable array, in a fixed order."""
    items = [
        ("vocab.lemma", params.vocab.lemma.matrix),
        ("vocab.pos", params.vocab.pos.matrix),
        ("vocab.deprel", params.vocab.deprel.matrix),
        ("vocab.direction", params.vocab.direction.matrix),
        ("rec.w_in", params.rec.w_in),
        ("rec.w_rec", params.rec.w_rec),
        ("rec.bias", params.rec.bias),
        ("w1", params.w1),
        ("b1", params.b1),
    ]
    if params.w2 is not None:
        items.append(("w2", params.w2))
        items.append(("b2", params.b2))
    if params.word_vectors is not None:
        items.append(("word_vectors", params.word_vectors.matrix))
    return items


def gradient_arrays(grads: ModelGrads) -> list[tuple[str, np.ndarray]]:
    """Same names and order as ``trainable_arrays``."""
    items = [
        ("vocab.lemma", grads.encoder.lemma),
        ("vocab.pos", grads.encoder.pos),
        ("vocab.deprel", grads.encoder.deprel),
        ("vocab.direction", grads.encoder.direction),
        ("rec.w_in", grads.encoder.w_in),
        ("rec.w_rec", grads.encoder.w_rec),
        ("rec.bias", grads.encoder.bias),
        ("w1", grads.w1),
        ("b1", grads.b1),
    ]
    if grads.w2 is not None:
        items.append(("w2", grads.w2))
        items.append(("b2", grads.b2))
    if grads.word_vectors is not None:
        items.append(("word_vectors", grads.word_vectors))
    return items


def loss_and_gradients(
    batch: Sequence[Example],
    params: ModelParams,
    table: EmbeddingTable,
    config: TrainConfig | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[float, ModelGrads]:
    """Mean negative log-likelihood over the batch, with exact gradients.

    Word dropout (config.word_dropout_rate > 0 with an rng supplied) replaces
    step lemmas by the unknown row, independently per step; with rate 0 the
    result is deterministic.
    """
    if not batch:
        raise ValueError("batch must be nonempty")
    rate = config.word_dropout_rate if config is not None else 0.0
    grads = ModelGrads.zeros(params)
    hidden = params.hidden_size
    d = params.word_dim
    scale = 1.0 / len(batch)
    total = 0.0
    for ex in batch:
        if ex.label is None:
            raise ValueError(f"example ({ex.x}, {ex.y}) has no label")
        gold = params.label_index(ex.label)
        v_paths, cache = average_paths_with_cache(
            ex.paths, params.vocab, params.rec, params.path_average, dropout_rate=rate, rng=rng
        )
        v = np.concatenate([params.word_vector(ex.x, table), v_paths, params.word_vector(ex.y, table)])
        a = params.w1 @ v + params.b1
        if params.w2 is not None:
            hval = np.tanh(a)
            logits = params.w2 @ hval + params.b2
        else:
            logits = a
        shifted = logits - logits.max()
        log_z = np.log(np.exp(shifted).sum())
        total += float(log_z - shifted[gold])

        probs = np.exp(shifted - log_z)
        d_logits = probs.copy()
        d_logits[gold] -= 1.0
        d_logits *= scale
        if params.w2 is not None:
            grads.w2 += np.outer(d_logits, hval)
            grads.b2 += d_logits
            d_a = (params.w2.T @ d_logits) * (1.0 - hval**2)
        else:
            d_a = d_logits
        grads.w1 += np.outer(d_a, v)
        grads.b1 += d_a
        d_v = params.w1.T @ d_a
        backprop_average(d_v[d : d + hidden], cache, params.vocab, params.rec, grads.encoder)
        if params.word_vectors is not None and grads.word_vectors is not None:
            row_x = params.word_vectors.row(ex.x)
            if row_x is not None:
                grads.word_vectors[row_x] += d_v[:d]
            row_y = params.word_vectors.row(ex.y)
            if row_y is not None:
                grads.word_vectors[row_y] += d_v[d + hidden :]
    return total * scale, grads


def apply_gradients(params: ModelParams, grads: ModelGrads, learning_rate: float) -> None:
    for (_, arr), (_, g) in zip(trainable_arrays(params), gradient_arrays(grads)):
        arr -= learning_rate * g


def init_params(
    config: TrainConfig,
    examples: Sequence[Example],
    table: EmbeddingTable,
    label_set: Sequence[str],
    rng: np.random.Generator,
) -> ModelParams:
    word_dim = table.dimension
    lemma_dim = config.lemma_dim if config.lemma_dim is not None else word_dim
    all_paths = (path for ex in examples for path in ex.paths)
    vocab = build_edge_vocab(
        all_paths,
        lemma_dim=lemma_dim,
        pos_dim=config.pos_dim,
        deprel_dim=config.deprel_dim,
        dir_dim=config.dir_dim,
        rng=rng,
        table=table if lemma_dim == word_dim else None,
    )
    rec = init_recurrent(vocab.input_width, config.hidden_dim, rng)
    feature_width = 2 * word_dim + config.hidden_dim
    n_labels = len(label_set)
    if config.hidden_layers == 1:
        w1 = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(config.mlp_hidden_dim, feature_width))
        b1 = rng.uniform(-INIT_SCALE, INIT_SCALE, size=config.mlp_hidden_dim)
        w2 = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(n_labels, config.mlp_hidden_dim))
        b2 = rng.uniform(-INIT_SCALE, INIT_SCALE, size=n_labels)
    else:
        w1 = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(n_labels, feature_width))
        b1 = rng.uniform(-INIT_SCALE, INIT_SCALE, size=n_labels)
        w2 = None
        b2 = None
    word_vectors = None
    if config.train_word_vectors:
        tokens = sorted({t.lower() for ex in examples for t in (ex.x, ex.y)})
        matrix = np.stack([np.array(table.lookup(t)) for t in tokens])
        word_vectors = TrainableWordVectors({t: i for i, t in enumerate(tokens)}, matrix)
    return ModelParams(
        vocab=vocab,
        rec=rec,
        w1=w1,
        b1=b1,
        w2=w2,
        b2=b2,
        label_set=tuple(label_set),
        word_dim=word_dim,
        path_average=config.path_average,
        word_vectors=word_vectors,
        seed=config.seed,
    )


def examples_from_records(records: Sequence[PairRecord], index: PathIndex) -> list[Example]:
    return [Example(r.x, r.y, index.get(r.x, r.y), r.label) for r in records]


def train(
    trainset: Sequence[PairRecord],
    val: Sequence[PairRecord],
    config: TrainConfig,
    index: PathIndex,
    table: EmbeddingTable,
    label_set: Sequence[str] | None = None,
) -> ModelParams:
    """Seeded per-example SGD; the same seed and data give identical parameters.

    ``label_set`` fixes the output order; it defaults to the sorted labels of
    the training set. Labels outside the set raise DataError.
    """
    if not trainset:
        raise DataError("training set is empty")
    labels = tuple(label_set) if label_set is not None else tuple(sorted({r.label for r in trainset}))
    stray = sorted({r.label for r in trainset} - set(labels))
    if stray:
        raise DataError(f"training labels outside the label set: {', '.join(stray)}")
    rng = np.random.default_rng(config.seed)
    examples = examples_from_records(trainset, index)
    params = init_params(config, examples, table, labels, rng)
    for epoch in range(config.epochs):
        for position in rng.permutation(len(examples)):
            ex = examples[int(position)]
            _, grads = loss_and_gradients([ex], params, table, config=config, rng=rng)
            apply_gradients(params, grads, config.learning_rate)
        if val:
            hits = sum(
                predict(pair_distribution(params, table, index, r.x, r.y)) == r.label for r in val
            )
            logger.debug("epoch %d: validation accuracy %.3f", epoch + 1, hits / len(val))
    return params


def training_loss(
    records: Sequence[PairRecord], params: ModelParams, table: EmbeddingTable, index: PathIndex
) -> float:
    """Mean cross-entropy of the model on the given records, without dropout."""
    loss, _ = loss_and_gradients(examples_from_records(records, index), params, table)
    return loss


def _component_doc(comp: ComponentEmbeddings) -> dict:
    return {"width": comp.width, "tokens": comp.tokens(), "matrix": comp.matrix.tolist()}


def _component_from_doc(doc: dict) -> ComponentEmbeddings:
    matrix = np.array(doc["matrix"], dtype=float)
    tokens = list(doc["tokens"])
    if matrix.ndim != 2 or matrix.shape[0] != len(tokens) + 1 or matrix.shape[1] != doc["width"]:
        raise DataError("component matrix shape does not match its token list")
    return ComponentEmbeddings({tok: i for i, tok in enumerate(tokens, start=1)}, matrix)


def save_model(params: ModelParams, destination) -> None:
    """Write the model as a versioned JSON document.

    Decimal values round-trip exactly, so a saved and reloaded model produces
    bit-identical forward passes.
    """
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "label_set": list(params.label_set),
        "hidden_layers": params.hidden_layers,
        "hidden_dim": params.hidden_size,
        "word_dim": params.word_dim,
        "path_average": params.path_average,
        "seed": params.seed,
        "edge_vocab": {
            "lemma": _component_doc(params.vocab.lemma),
            "pos": _component_doc(params.vocab.pos),
            "deprel": _component_doc(params.vocab.deprel),
            "direction": _component_doc(params.vocab.direction),
        },
        "recurrent": {
            "w_in": params.rec.w_in.tolist(),
            "w_rec": params.rec.w_rec.tolist(),
            "bias": params.rec.bias.tolist(),
        },
        "classifier": {
            "w1": params.w1.tolist(),
            "b1": params.b1.tolist(),
            "w2": None if params.w2 is None else params.w2.tolist(),
            "b2": None if params.b2 is None else params.b2.tolist(),
        },
        "word_vectors": None
        if params.word_vectors is None
        else {
            "tokens": sorted(params.word_vectors.index, key=params.word_vectors.index.get),
            "matrix": params.word_vectors.matrix.tolist(),
        },
    }
    text = json.dumps(doc, indent=1)
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        destination.write(text + "\n")


def load_model(source) -> ModelParams:
    """Read a model written by ``save_model``."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise DataError("not a relation model file")
    if doc.get("version") != MODEL_VERSION:
        raise DataError(f"unsupported model version {doc.get('version')!r}")
    vocab_doc = doc["edge_vocab"]
    vocab = EdgeVocab(
        lemma=_component_from_doc(vocab_doc["lemma"]),
        pos=_component_from_doc(vocab_doc["pos"]),
        deprel=_component_from_doc(vocab_doc["deprel"]),
        direction=_component_from_doc(vocab_doc["direction"]),
    )
    rec = RecurrentParams(
        w_in=np.array(doc["recurrent"]["w_in"], dtype=float),
        w_rec=np.array(doc["recurrent"]["w_rec"], dtype=float),
        bias=np.array(doc["recurrent"]["bias"], dtype=float),
    )
    cls_doc = doc["classifier"]
    w2 = cls_doc["w2"]
    b2 = cls_doc["b2"]
    wv_doc = doc.get("word_vectors")
    word_vectors = None
    if wv_doc is not None:
        word_vectors = TrainableWordVectors(
            {tok: i for i, tok in enumerate(wv_doc["tokens"])},
            np.array(wv_doc["matrix"], dtype=float),
        )
    params = ModelParams(
        vocab=vocab,
        rec=rec,
        w1=np.array(cls_doc["w1"], dtype=float),
        b1=np.array(cls_doc["b1"], dtype=float),
        w2=None if w2 is None else np.array(w2, dtype=float),
        b2=None if b2 is None else np.array(b2, dtype=float),
        label_set=tuple(doc["label_set"]),
        word_dim=int(doc["word_dim"]),
        path_average=doc.get("path_average", WEIGHTED),
        word_vectors=word_vectors,
        seed=doc.get("seed"),
    )
    if params.path_average not in AVERAGE_MODES:
        raise DataError(f"unknown path_average mode {params.path_average!r} in model file")
    if doc["hidden_layers"] != params.hidden_layers:
        raise DataError("hidden_layers field disagrees with the stored matrices")
    return params

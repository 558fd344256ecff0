import io

import numpy as np
import pytest

from semrel.baselines import (
    baseline_classify,
    baseline_predict,
    combine_vectors,
    features_for_pairs,
    load_linear,
    predict_linear,
    save_linear,
    train_linear,
    tune_cosine_threshold,
)
from semrel.embeddings import EmbeddingTable
from semrel.errors import DataError
from semrel.pairs import PairRecord, RELATED, UNRELATED


def fixed_table(vectors):
    entries = {}
    dim = len(next(iter(vectors.values())))
    for word, vec in vectors.items():
        arr = np.asarray(vec, dtype=float)
        arr.flags.writeable = False
        entries[word] = arr
    return EmbeddingTable(dim, entries, np.zeros(dim))


def separable_world(n_per_class=20, seed=4):
    """Two classes with linearly separable concatenated vectors."""
    rng = np.random.default_rng(seed)
    vectors, records = {}, []
    for i in range(n_per_class):
        for label, center in (("LEFT", -2.0), ("RIGHT", 2.0)):
            x = f"{label.lower()}x{i}"
            y = f"{label.lower()}y{i}"
            vectors[x] = rng.normal(loc=center, scale=0.3, size=3)
            vectors[y] = rng.normal(loc=center, scale=0.3, size=3)
            records.append(PairRecord(x, y, label))
    return fixed_table(vectors), records


# ------------------------------------------------------ feature building


def test_combine_vectors_hand_values():
    vx = np.array([1.0, 2.0])
    vy = np.array([3.0, 5.0])
    assert np.array_equal(combine_vectors(vx, vy, "concat"), [1.0, 2.0, 3.0, 5.0])
    assert np.array_equal(combine_vectors(vx, vy, "diff"), [-2.0, -3.0])
    assert np.array_equal(combine_vectors(vx, vy, "asym"), [-2.0, -3.0, 4.0, 9.0])
    with pytest.raises(ValueError):
        combine_vectors(vx, vy, "sum")


def test_features_for_pairs_stacks_rows():
    table = fixed_table({"a": [1.0, 0.0], "b": [0.0, 1.0]})
    feats = features_for_pairs([PairRecord("a", "b", ""), PairRecord("b", "a", "")], table, "diff")
    assert feats.shape == (2, 2)
    assert np.array_equal(feats[0], [1.0, -1.0])


# -------------------------------------------------------------- training


def test_separable_data_is_fit_perfectly():
    table, records = separable_world()
    model = train_linear(records, table, epochs=20, seed=3)
    predictions = [predict_linear(model, table, r.x, r.y) for r in records]
    assert predictions == [r.label for r in records]


def test_training_is_deterministic():
    table, records = separable_world()
    a = train_linear(records, table, epochs=5, seed=9)
    b = train_linear(records, table, epochs=5, seed=9)
    assert np.array_equal(a.weights, b.weights) and np.array_equal(a.bias, b.bias)


def test_zero_strength_matches_unregularized_bitwise():
    table, records = separable_world()
    plain = train_linear(records, table, epochs=5, seed=9)
    l1 = train_linear(records, table, epochs=5, seed=9, regularizer="l1", strength=0.0)
    l2 = train_linear(records, table, epochs=5, seed=9, regularizer="l2", strength=0.0)
    assert np.array_equal(plain.weights, l1.weights)
    assert np.array_equal(plain.weights, l2.weights)


def test_huge_l1_strength_zeroes_weights_exactly():
    table, records = separable_world()
    model = train_linear(records, table, epochs=10, seed=9, regularizer="l1", strength=100.0)
    assert np.all(model.weights == 0.0)


def test_l2_decay_hand_arithmetic():
    # One example, margin stays active through both epochs. By hand, with
    # lr=0.1 and strength=0.5 (decay factor 0.95):
    #   epoch 1: w = 0 -> decay no-op -> w = 0.1 * f
    #   epoch 2: w = 0.95 * 0.1 * f + 0.1 * f = 0.195 * f
    # Without decay the same two epochs give w = 0.2 * f.
    table = fixed_table({"a": [0.1, 0.0], "b": [0.0, 0.1]})
    records = [PairRecord("a", "b", "P")]
    f = np.array([0.1, 0.0, 0.0, 0.1])
    plain = train_linear(records, table, epochs=2, learning_rate=0.1, seed=0)
    decayed = train_linear(records, table, epochs=2, learning_rate=0.1, seed=0,
                           regularizer="l2", strength=0.5)
    assert np.allclose(plain.weights[0], 0.2 * f, atol=1e-15)
    assert np.allclose(decayed.weights[0], 0.195 * f, atol=1e-15)


def test_training_input_validation():
    table, records = separable_world(n_per_class=2)
    with pytest.raises(DataError):
        train_linear([], table)
    with pytest.raises(ValueError):
        train_linear(records, table, method="sum")
    with pytest.raises(ValueError):
        train_linear(records, table, regularizer="l3")
    with pytest.raises(ValueError):
        train_linear(records, table, strength=-1.0)
    with pytest.raises(DataError, match="LEFT"):
        train_linear(records, table, label_set=("RIGHT",))


# ---------------------------------------------------- gate and pipeline


def test_tune_cosine_threshold_hand_case():
    table = fixed_table({
        "r1": [1.0, 0.0], "r2": [1.0, 0.0],
        "u1": [1.0, 0.0], "u2": [-1.0, 0.0],
    })
    val = [PairRecord("r1", "r2", RELATED), PairRecord("u1", "u2", UNRELATED)]
    t, f1 = tune_cosine_threshold(val, table)
    assert f1 == 1.0
    assert t == 0.01  # smallest grid point that separates 1.0 from 0.0


def test_tune_cosine_threshold_needs_both_classes():
    table = fixed_table({"a": [1.0, 0.0], "b": [1.0, 0.0]})
    with pytest.raises(DataError):
        tune_cosine_threshold([PairRecord("a", "b", RELATED)], table)


def test_baseline_gate_and_classifier():
    table = fixed_table({
        "r1": [1.0, 0.0], "r2": [1.0, 0.0],
        "u1": [1.0, 0.0], "u2": [-1.0, 0.0],
    })
    train_recs = [PairRecord("r1", "r2", "SYN")]
    model = train_linear(train_recs, table, epochs=2, seed=0, label_set=("ANT", "SYN"))
    assert baseline_classify(model, table, 0.8, "u1", "u2", "RANDOM") == "RANDOM"
    assert baseline_classify(model, table, 0.8, "r1", "r2", "RANDOM") == "SYN"
    labels = baseline_predict(model, table, 0.8,
                              [PairRecord("r1", "r2", ""), PairRecord("u1", "u2", "")], "RANDOM")
    assert labels == ["SYN", "RANDOM"]


# ----------------------------------------------------------- persistence


def test_save_load_round_trip(tmp_path):
    table, records = separable_world(n_per_class=3)
    model = train_linear(records, table, epochs=3, seed=2, method="asym")
    target = tmp_path / "linear.json"
    save_linear(model, target)
    loaded = load_linear(target)
    assert loaded.labels == model.labels and loaded.method == "asym"
    assert np.array_equal(loaded.weights, model.weights)
    assert np.array_equal(loaded.bias, model.bias)


def test_load_rejects_wrong_format():
    with pytest.raises(DataError):
        load_linear(io.StringIO('{"format": "other"}'))

"""A synthetic parsed corpus with known relational structure.

The world is built so that each specific relation is recoverable only from
dependency paths, never from the word vectors alone: every related pair
(whatever its class) gets y close to x in embedding space by the same recipe,
while unrelated pairs get independent vectors. Hypernym pairs co-occur in
"x is a kind of y" / "y such as x" sentences, part-whole pairs in
"x is part of y" / "the x of the y", antonyms in coordinations ("choose x or
y", "x or y"), and synonym pairs never co-occur at all, so their evidence is
a high cosine with an empty path multiset. A slice of the unrelated pairs
also co-occurs once (apposition) so that "has any path" is not a gate.

Everything is driven by one seed and returned as plain file texts, ready to
be written to disk and pushed through the command-line interface.
"""

from collections import namedtuple

import numpy as np

from semrel.pairs import PairRecord

DIM = 24
NOISE = 0.15

World = namedtuple("World", "conll pairs embeddings")


def _unit(rng):
    v = rng.normal(size=DIM)
    return v / np.linalg.norm(v)


def _sentence(rows):
    return "\n".join(
        f"{i}\t{form}\t{lemma}\t{pos}\t_\t_\t{head}\t{deprel}"
        for i, (form, lemma, pos, head, deprel) in enumerate(rows, start=1)
    )


def _hyper_v1(x, y):  # x is a kind of y
    return _sentence([
        (x, x, "NOUN", 4, "nsubj"),
        ("is", "be", "VERB", 4, "cop"),
        ("a", "a", "DET", 4, "det"),
        ("kind", "kind", "NOUN", 0, "root"),
        ("of", "of", "ADP", 6, "case"),
        (y, y, "NOUN", 4, "nmod"),
    ])


def _hyper_v2(x, y):  # y such as x
    return _sentence([
        (y, y, "NOUN", 0, "root"),
        ("such", "such", "ADJ", 4, "case"),
        ("as", "as", "ADP", 4, "case"),
        (x, x, "NOUN", 1, "nmod"),
    ])


def _part_v1(x, y):  # x is part of y
    return _sentence([
        (x, x, "NOUN", 3, "nsubj"),
        ("is", "be", "VERB", 3, "cop"),
        ("part", "part", "NOUN", 0, "root"),
        ("of", "of", "ADP", 5, "case"),
        (y, y, "NOUN", 3, "nmod"),
    ])


def _part_v2(x, y):  # the x of the y
    return _sentence([
        ("the", "the", "DET", 2, "det"),
        (x, x, "NOUN", 0, "root"),
        ("of", "of", "ADP", 5, "case"),
        ("the", "the", "DET", 5, "det"),
        (y, y, "NOUN", 2, "nmod"),
    ])


def _ant_v1(x, y):  # choose x or y
    return _sentence([
        ("choose", "choose", "VERB", 0, "root"),
        (x, x, "NOUN", 1, "dobj"),
        ("or", "or", "CCONJ", 4, "cc"),
        (y, y, "NOUN", 2, "conj"),
    ])


def _ant_v2(x, y):  # x or y
    return _sentence([
        (x, x, "NOUN", 0, "root"),
        ("or", "or", "CCONJ", 3, "cc"),
        (y, y, "NOUN", 1, "conj"),
    ])


def _appos(x, y):  # x , y  (generic co-occurrence, no relation)
    return _sentence([
        (x, x, "NOUN", 0, "root"),
        (",", ",", "PUNCT", 3, "punct"),
        (y, y, "NOUN", 1, "appos"),
    ])


def _solo(w):  # the w sleeps
    return _sentence([
        ("the", "the", "DET", 2, "det"),
        (w, w, "NOUN", 3, "nsubj"),
        ("sleeps", "sleep", "VERB", 0, "root"),
    ])


def _filler(rng, nouns, verbs):  # the N V a N
    a = nouns[int(rng.integers(len(nouns)))]
    b = nouns[int(rng.integers(len(nouns)))]
    v = verbs[int(rng.integers(len(verbs)))]
    return _sentence([
        ("the", "the", "DET", 2, "det"),
        (a, a, "NOUN", 3, "nsubj"),
        (v, v, "VERB", 0, "root"),
        ("a", "a", "DET", 5, "det"),
        (b, b, "NOUN", 3, "dobj"),
    ])


_PATTERNS = {
    "HYPER": (_hyper_v1, _hyper_v2),
    "PART_OF": (_part_v1, _part_v2),
    "ANT": (_ant_v1, _ant_v2),
}

_PER_CLASS = 60
_N_RANDOM = 260
_X_PER_CLASS = 45  # fewer x words than pairs, so some x's label two pairs
_X_RANDOM = 200


def _make_pairs(prefix, n_pairs, n_x):
    xs = [f"{prefix}x{i:03d}" for i in range(n_x)]
    x_list = (xs * ((n_pairs + n_x - 1) // n_x))[:n_pairs]
    ys = [f"{prefix}y{i:03d}" for i in range(n_pairs)]
    return list(zip(x_list, ys))


def generate_world(seed=20, n_sentences=5000):
    rng = np.random.default_rng(seed)
    records = []
    vectors = {}
    sentences = []

    by_label = {
        "HYPER": _make_pairs("h", _PER_CLASS, _X_PER_CLASS),
        "PART_OF": _make_pairs("p", _PER_CLASS, _X_PER_CLASS),
        "ANT": _make_pairs("a", _PER_CLASS, _X_PER_CLASS),
        "SYN": _make_pairs("s", _PER_CLASS, _X_PER_CLASS),
        "RANDOM": _make_pairs("r", _N_RANDOM, _X_RANDOM),
    }

    for label, wordpairs in by_label.items():
        for x, y in wordpairs:
            records.append(PairRecord(x, y, label))
            if label == "RANDOM":
                vectors.setdefault(x, _unit(rng))
                vectors.setdefault(y, _unit(rng))
            else:
                # Same closeness recipe for every related class: the word
                # vectors alone cannot tell the classes apart.
                vectors.setdefault(x, _unit(rng))
                noisy = vectors[x] + NOISE * _unit(rng)
                vectors[y] = noisy / np.linalg.norm(noisy)

    for label, variants in _PATTERNS.items():
        for x, y in by_label[label]:
            for _ in range(int(rng.integers(2, 5))):
                make = variants[int(rng.integers(len(variants)))]
                sentences.append(make(x, y))

    # Synonyms and unrelated words still occur in text, just not together.
    for x, y in by_label["SYN"]:
        sentences.append(_solo(x))
        sentences.append(_solo(y))
    for x, y in by_label["RANDOM"]:
        if rng.random() < 0.10:
            sentences.append(_appos(x, y))
        else:
            sentences.append(_solo(x))

    nouns = [f"fill{i:03d}" for i in range(40)]
    verbs = [f"do{i:02d}" for i in range(15)]
    while len(sentences) < n_sentences:
        sentences.append(_filler(rng, nouns, verbs))

    order = rng.permutation(len(sentences))
    conll = "\n\n".join(sentences[int(i)] for i in order) + "\n"

    lines = []
    for word in sorted(vectors):
        values = " ".join(f"{v:.6f}" for v in vectors[word])
        lines.append(f"{word} {values}")
    return World(conll=conll, pairs=records, embeddings="\n".join(lines) + "\n")

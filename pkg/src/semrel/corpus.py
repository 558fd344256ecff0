"""Dependency-parsed corpora: CoNLL-style parsing and tree paths between terms.

Corpus files are UTF-8 text with one token per line and blank lines between
sentences. Token lines carry at least eight tab-separated columns
(ID, FORM, LEMMA, UPOS, _, _, HEAD, DEPREL, ...); extra columns are ignored
and lines starting with '#' are comments. HEAD 0 marks the sentence root.

A path between two terms walks the undirected dependency tree from the x
occurrence to the y occurrence. Every node on the walk contributes one step
(lemma, POS, dependency label, traversal direction); the endpoints carry the
placeholders X and Y instead of their surface lemmas. The direction is "up"
while the walk climbs toward heads, "down" while it descends, and "root" at
the single apex node where it turns around. The number of tree edges on the
walk (one less than the number of steps) is what ``max_edges`` bounds.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable
from urllib.parse import quote, unquote

from ._io import open_lines, write_text
from .errors import ParseError

UP = "up"
DOWN = "down"
ROOT = "root"
DIRECTIONS = (UP, DOWN, ROOT)

X_PLACEHOLDER = "X"
Y_PLACEHOLDER = "Y"

DEFAULT_MAX_EDGES = 4

_DIR_TO_SYMBOL = {UP: "<", DOWN: ">", ROOT: "^"}
_SYMBOL_TO_DIR = {s: d for d, s in _DIR_TO_SYMBOL.items()}
_STEP_SEP = "::"

INDEX_HEADER = "# semrel path index v1"


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str
    pos: str
    head: int
    deprel: str


@dataclass(frozen=True)
class SentenceGraph:
    """One parsed sentence; tokens are 1-indexed and heads form a tree under 0."""

    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def lemma_positions(self, lemma: str) -> list[int]:
        """Indices of tokens whose lemma matches, case-insensitively."""
        needle = lemma.lower()
        return [t.index for t in self.tokens if t.lemma.lower() == needle]


@dataclass(frozen=True)
class PathEdge:
    """One step of a dependency path.

    ``lemma`` is the node's lowercased lemma, or the X/Y placeholder at the
    endpoints; ``deprel`` is the node's own label toward its head; ``direction``
    is one of "up", "down", "root".
    """

    lemma: str
    pos: str
    deprel: str
    direction: str


@dataclass(frozen=True)
class DependencyPath:
    """Steps from the X endpoint to the Y endpoint, one per node on the walk."""

    edges: tuple[PathEdge, ...]

    @property
    def tree_length(self) -> int:
        """Number of tree edges between the endpoints."""
        return len(self.edges) - 1


def parse_conll(stream) -> list[SentenceGraph]:
    """Parse blank-line-separated CoNLL-style blocks into sentence graphs.

    Accepts a string, an open file, or any iterable of lines. Raises
    ParseError, naming the offending line, for short rows, non-numeric ID or
    HEAD fields, or head links that do not form a single-rooted tree.
    """
    lines = stream.splitlines() if isinstance(stream, str) else stream
    sentences = []
    block: list[tuple[int, list[str]]] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if line.startswith("#"):
            continue
        if not line.strip():
            if block:
                sentences.append(_build_sentence(block))
                block = []
            continue
        cols = line.split("\t")
        if len(cols) < 8:
            raise ParseError(
                f"expected at least 8 tab-separated columns, found {len(cols)} at line {line_no}"
            )
        block.append((line_no, cols))
    if block:
        sentences.append(_build_sentence(block))
    return sentences


def _build_sentence(block: list[tuple[int, list[str]]]) -> SentenceGraph:
    tokens = []
    line_of = {}
    for position, (line_no, cols) in enumerate(block, start=1):
        try:
            idx = int(cols[0])
        except ValueError:
            raise ParseError(f"non-numeric ID {cols[0]!r} at line {line_no}") from None
        if idx != position:
            raise ParseError(f"token IDs must run 1..n, found {idx} at line {line_no}")
        try:
            head = int(cols[6])
        except ValueError:
            raise ParseError(f"non-numeric HEAD {cols[6]!r} at line {line_no}") from None
        tokens.append(Token(idx, cols[1], cols[2], cols[3], head, cols[7]))
        line_of[idx] = line_no

    n = len(tokens)
    for tok in tokens:
        if tok.head == tok.index:
            raise ParseError(f"self-loop at line {line_of[tok.index]}")
        if not 0 <= tok.head <= n:
            raise ParseError(f"HEAD {tok.head} out of range 0..{n} at line {line_of[tok.index]}")
    roots = [t.index for t in tokens if t.head == 0]
    if not roots:
        raise ParseError(f"no root token in sentence ending at line {line_of[n]}")
    if len(roots) > 1:
        raise ParseError(f"multiple root tokens at line {line_of[roots[1]]}")

    # Every token must reach the artificial root; anything else is a cycle.
    state = [0] * (n + 1)  # 0 unvisited, 1 on the current walk, 2 cleared
    for start in range(1, n + 1):
        node, walk = start, []
        while node != 0 and state[node] == 0:
            state[node] = 1
            walk.append(node)
            node = tokens[node - 1].head
        if node != 0 and state[node] == 1:
            raise ParseError(f"cyclic head links at line {line_of[node]}")
        for visited in walk:
            state[visited] = 2
    return SentenceGraph(tuple(tokens))


def extract_paths(
    sentence: SentenceGraph, x_lemma: str, y_lemma: str, max_edges: int = DEFAULT_MAX_EDGES
) -> Counter:
    """Paths between every x occurrence and every y occurrence, as a multiset.

    Only walks of at most ``max_edges`` tree edges are kept. Lemma matching is
    case-insensitive; occurrences at the same position are skipped.
    """
    if max_edges < 1:
        raise ValueError("max_edges must be at least 1")
    found: Counter = Counter()
    xs = sentence.lemma_positions(x_lemma)
    if not xs:
        return found
    ys = sentence.lemma_positions(y_lemma)
    if not ys:
        return found
    heads = [0] + [t.head for t in sentence.tokens]
    for xi in xs:
        for yi in ys:
            if xi == yi:
                continue
            nodes = _tree_path(heads, xi, yi)
            if len(nodes) - 1 > max_edges:
                continue
            found[_path_from_nodes(sentence, nodes)] += 1
    return found


def _tree_path(heads: list[int], a: int, b: int) -> list[int]:
    """Nodes on the unique tree walk from a to b, inclusive."""
    chain_a = []
    node = a
    while node != 0:
        chain_a.append(node)
        node = heads[node]
    depth_a = {n: i for i, n in enumerate(chain_a)}
    chain_b = []
    node = b
    while node not in depth_a:
        chain_b.append(node)
        node = heads[node]
    return chain_a[: depth_a[node] + 1] + list(reversed(chain_b))


def _path_from_nodes(sentence: SentenceGraph, nodes: list[int]) -> DependencyPath:
    steps = []
    last = len(nodes) - 1
    for i, node in enumerate(nodes):
        tok = sentence.token(node)
        if i == 0:
            lemma = X_PLACEHOLDER
        elif i == last:
            lemma = Y_PLACEHOLDER
        else:
            lemma = tok.lemma.lower()
        if i < last and tok.head == nodes[i + 1]:
            direction = UP
        elif i > 0 and tok.head == nodes[i - 1]:
            direction = DOWN
        else:
            direction = ROOT
        steps.append(PathEdge(lemma, tok.pos, tok.deprel, direction))
    return DependencyPath(tuple(steps))


class PathIndex:
    """Dependency-path multisets keyed by ordered (x, y) lemma pairs.

    Keys are lowercased on every access; a pair that never co-occurred maps to
    an empty multiset. Immutable once built, apart from ``add``.
    """

    def __init__(self):
        self._pairs: dict[tuple[str, str], Counter] = {}

    @staticmethod
    def _key(x: str, y: str) -> tuple[str, str]:
        return (x.lower(), y.lower())

    def add(self, x: str, y: str, path: DependencyPath, count: int = 1) -> None:
        if count < 1:
            raise ValueError("count must be positive")
        self._pairs.setdefault(self._key(x, y), Counter())[path] += count

    def get(self, x: str, y: str) -> Counter:
        """A copy of the pair's path multiset; empty when the pair is absent."""
        return Counter(self._pairs.get(self._key(x, y), ()))

    def total_count(self, x: str, y: str) -> int:
        return sum(self._pairs.get(self._key(x, y), Counter()).values())

    def distinct_count(self, x: str, y: str) -> int:
        return len(self._pairs.get(self._key(x, y), ()))

    def pair_keys(self) -> list[tuple[str, str]]:
        return sorted(self._pairs)

    def __len__(self) -> int:
        return len(self._pairs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PathIndex):
            return NotImplemented
        return self._pairs == other._pairs


def build_path_index(
    corpus: Iterable[SentenceGraph], pairs: Iterable[tuple[str, str]], max_edges: int = DEFAULT_MAX_EDGES
) -> PathIndex:
    """Extract and pool paths for every given pair over the whole corpus.

    The result does not depend on sentence order: per-pair multisets are
    merged by commutative addition.
    """
    index = PathIndex()
    wanted = {(x.lower(), y.lower()) for x, y in pairs}
    for sentence in corpus:
        present = {t.lemma.lower() for t in sentence.tokens}
        for x, y in wanted:
            if x in present and y in present:
                for path, count in extract_paths(sentence, x, y, max_edges).items():
                    index.add(x, y, path, count)
    return index


def path_to_text(path: DependencyPath) -> str:
    """Serialize a path as ``lemma/pos/deprel/dir`` steps joined by "::".

    Direction symbols are "<" (up), ">" (down), and "^" (root). Field text is
    percent-encoded so the round trip through ``path_from_text`` is exact.
    """
    steps = []
    for edge in path.edges:
        steps.append(
            "/".join(
                (
                    _quote(edge.lemma),
                    _quote(edge.pos),
                    _quote(edge.deprel),
                    _DIR_TO_SYMBOL[edge.direction],
                )
            )
        )
    return _STEP_SEP.join(steps)


def path_from_text(text: str) -> DependencyPath:
    """Inverse of ``path_to_text``."""
    if not text:
        raise ParseError("empty path text")
    edges = []
    for step in text.split(_STEP_SEP):
        fields = step.split("/")
        if len(fields) != 4:
            raise ParseError(f"malformed path step {step!r}")
        direction = _SYMBOL_TO_DIR.get(fields[3])
        if direction is None:
            raise ParseError(f"unknown direction symbol {fields[3]!r} in step {step!r}")
        edges.append(PathEdge(unquote(fields[0]), unquote(fields[1]), unquote(fields[2]), direction))
    return DependencyPath(tuple(edges))


def _quote(field: str) -> str:
    return quote(field, safe="")


def save_index(index: PathIndex, destination) -> None:
    """Write an index as sorted ``x<TAB>y<TAB>path<TAB>count`` lines."""
    lines = [INDEX_HEADER]
    for x, y in index.pair_keys():
        rows = sorted((path_to_text(p), c) for p, c in index.get(x, y).items())
        lines.extend(f"{x}\t{y}\t{text}\t{count}" for text, count in rows)
    write_text(destination, "\n".join(lines) + "\n")


def load_index(source) -> PathIndex:
    """Read an index written by ``save_index``."""
    index = PathIndex()
    with open_lines(source) as lines:
        for line_no, raw in enumerate(lines, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise ParseError(f"expected 4 columns at line {line_no}")
            try:
                count = int(cols[3])
            except ValueError:
                raise ParseError(f"non-numeric count {cols[3]!r} at line {line_no}") from None
            if count < 1:
                raise ParseError(f"count must be positive at line {line_no}")
            index.add(cols[0], cols[1], path_from_text(cols[2]), count)
    return index

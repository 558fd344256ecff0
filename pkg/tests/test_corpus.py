import io
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import CAT_CONLL, conll_text
from oracles import bfs_path, depth_directions, random_tree
from semrel.corpus import (
    DependencyPath,
    PathEdge,
    PathIndex,
    SentenceGraph,
    Token,
    build_path_index,
    extract_paths,
    load_index,
    parse_conll,
    path_from_text,
    path_to_text,
    save_index,
)
from semrel.errors import ParseError


@pytest.fixture
def cat_sentence():
    return parse_conll(CAT_CONLL)[0]


# ---------------------------------------------------------------- parsing


def test_parse_cat_sentence(cat_sentence):
    assert len(cat_sentence) == 7
    cat = cat_sentence.token(3)
    assert cat.form == "cat" and cat.lemma == "cat" and cat.pos == "NOUN"
    assert cat.head == 4 and cat.deprel == "nsubj"
    assert cat_sentence.token(4).head == 0


def test_parse_accepts_string_file_and_lines():
    from_string = parse_conll(CAT_CONLL)
    from_file = parse_conll(io.StringIO(CAT_CONLL))
    from_lines = parse_conll(CAT_CONLL.splitlines())
    assert from_string == from_file == from_lines


def test_blank_line_separates_sentences_and_comments_skipped():
    text = "# doc 1\n" + CAT_CONLL + "\n# doc 2\n" + CAT_CONLL
    assert len(parse_conll(text)) == 2


def test_lemma_positions_fold_case():
    sentence = parse_conll(conll_text([("Cats", "Cat", "NOUN", 2, "nsubj"),
                                       ("sleep", "sleep", "VERB", 0, "root")]))[0]
    assert sentence.lemma_positions("cat") == [1]
    assert sentence.lemma_positions("CAT") == [1]


def test_short_row_rejected():
    with pytest.raises(ParseError, match="line 1"):
        parse_conll("1\tcat\tcat\tNOUN\n")


def test_non_numeric_id():
    bad = CAT_CONLL.replace("5\ta", "5-6\ta", 1)
    with pytest.raises(ParseError, match="line 5"):
        parse_conll(bad)


def test_ids_must_run_from_one():
    rows = conll_text([("a", "a", "X", 0, "root")]).replace("1\t", "2\t", 1)
    with pytest.raises(ParseError, match="IDs must run 1..n"):
        parse_conll(rows)


def test_head_out_of_range():
    with pytest.raises(ParseError, match="out of range"):
        parse_conll(conll_text([("a", "a", "X", 5, "root")]))


def test_self_loop_rejected():
    with pytest.raises(ParseError, match="self-loop at line 2"):
        parse_conll(conll_text([("a", "a", "X", 0, "root"), ("b", "b", "X", 2, "dep")]))


def test_missing_root_rejected():
    with pytest.raises(ParseError, match="no root"):
        parse_conll(conll_text([("a", "a", "X", 2, "dep"), ("b", "b", "X", 1, "dep")]))


def test_multiple_roots_rejected():
    with pytest.raises(ParseError, match="multiple root"):
        parse_conll(conll_text([("a", "a", "X", 0, "root"), ("b", "b", "X", 0, "root")]))


def test_cycle_rejected():
    rows = [("r", "r", "X", 0, "root"), ("a", "a", "X", 3, "dep"),
            ("b", "b", "X", 4, "dep"), ("c", "c", "X", 2, "dep")]
    with pytest.raises(ParseError, match="cyclic"):
        parse_conll(conll_text(rows))


# ------------------------------------------------------- path extraction


def test_cat_mouse_path(cat_sentence):
    paths = extract_paths(cat_sentence, "cat", "mouse")
    assert len(paths) == 1
    (path, count), = paths.items()
    assert count == 1
    assert path.edges == (
        PathEdge("X", "NOUN", "nsubj", "up"),
        PathEdge("chase", "VERB", "root", "root"),
        PathEdge("Y", "NOUN", "dobj", "down"),
    )
    assert path.tree_length == 2


def test_reversed_pair_swaps_directions(cat_sentence):
    (path,) = extract_paths(cat_sentence, "mouse", "cat")
    assert path.edges == (
        PathEdge("X", "NOUN", "dobj", "up"),
        PathEdge("chase", "VERB", "root", "root"),
        PathEdge("Y", "NOUN", "nsubj", "down"),
    )


def test_interior_lemmas_are_lowercased():
    rows = [("Dogs", "Dog", "NOUN", 2, "nsubj"), ("Chased", "Chase", "VERB", 0, "root"),
            ("Cats", "Cat", "NOUN", 2, "dobj")]
    sentence = parse_conll(conll_text(rows))[0]
    (path,) = extract_paths(sentence, "dog", "cat")
    assert path.edges[1].lemma == "chase"
    assert path.edges[0].lemma == "X" and path.edges[2].lemma == "Y"


def test_adjacent_tokens_share_one_edge(cat_sentence):
    # black -> cat is a single tree edge: two steps, apex at the cat node.
    (path,) = extract_paths(cat_sentence, "black", "cat")
    assert path.edges == (
        PathEdge("X", "ADJ", "amod", "up"),
        PathEdge("Y", "NOUN", "nsubj", "root"),
    )
    assert path.tree_length == 1


def test_max_edges_bounds_tree_edges(cat_sentence):
    # black-cat-chase-mouse-gray covers four tree edges.
    assert len(extract_paths(cat_sentence, "black", "gray", max_edges=4)) == 1
    assert len(extract_paths(cat_sentence, "black", "gray", max_edges=3)) == 0
    (path,) = extract_paths(cat_sentence, "black", "gray", max_edges=4)
    assert path.tree_length == 4 and len(path.edges) == 5


def test_absent_lemma_gives_empty_multiset(cat_sentence):
    assert extract_paths(cat_sentence, "cat", "dog") == Counter()


def test_max_edges_must_be_positive(cat_sentence):
    with pytest.raises(ValueError):
        extract_paths(cat_sentence, "cat", "mouse", max_edges=0)


def test_repeated_occurrences_are_counted():
    rows = [("cat", "cat", "NOUN", 2, "nsubj"), ("saw", "see", "VERB", 0, "root"),
            ("a", "a", "DET", 4, "det"), ("cat", "cat", "NOUN", 2, "dobj"),
            ("and", "and", "CCONJ", 6, "cc"), ("dog", "dog", "NOUN", 4, "conj")]
    sentence = parse_conll(conll_text(rows))[0]
    paths = extract_paths(sentence, "cat", "dog")
    # one path per cat occurrence, and they differ
    assert sum(paths.values()) == 2 and len(paths) == 2


def test_identical_lemma_pair_skips_same_position(cat_sentence):
    assert extract_paths(cat_sentence, "cat", "cat") == Counter()


def test_directions_match_depth_oracle_on_random_trees():
    rng = np.random.default_rng(5)
    pos_tags = ["NOUN", "VERB", "ADJ"]
    deprels = ["nsubj", "dobj", "nmod", "conj"]
    for _ in range(100):
        n = int(rng.integers(2, 9))
        heads = random_tree(rng, n)
        tokens = tuple(
            Token(i, f"w{i}", f"w{i}", pos_tags[i % 3], heads[i - 1],
                  "root" if heads[i - 1] == 0 else deprels[i % 4])
            for i in range(1, n + 1)
        )
        sentence = SentenceGraph(tokens)
        a, b = rng.choice(np.arange(1, n + 1), size=2, replace=False)
        walk = bfs_path(heads, int(a), int(b))
        expected_dirs = depth_directions(heads, walk)
        paths = extract_paths(sentence, f"w{int(a)}", f"w{int(b)}", max_edges=n)
        assert len(paths) == 1
        (path,) = paths
        assert [e.direction for e in path.edges] == expected_dirs
        assert path.edges[0].lemma == "X" and path.edges[-1].lemma == "Y"


# ------------------------------------------------------------ text form


def test_path_text_worked_example(cat_sentence):
    (path,) = extract_paths(cat_sentence, "cat", "mouse")
    assert path_to_text(path) == "X/NOUN/nsubj/<::chase/VERB/root/^::Y/NOUN/dobj/>"


def test_path_text_round_trips_special_characters():
    path = DependencyPath((
        PathEdge("X", "NOUN", "nsubj", "up"),
        PathEdge("a/b::c", "SYM%", "de p", "root"),
        PathEdge("Y", "NOUN", "dobj", "down"),
    ))
    assert path_from_text(path_to_text(path)) == path


@settings(max_examples=50, deadline=None)
@given(st.lists(
    st.tuples(st.text(min_size=1, max_size=6), st.text(min_size=1, max_size=4),
              st.text(min_size=1, max_size=6), st.sampled_from(["up", "down", "root"])),
    min_size=1, max_size=5,
))
def test_path_text_round_trip_property(steps):
    path = DependencyPath(tuple(PathEdge(*s) for s in steps))
    assert path_from_text(path_to_text(path)) == path


def test_path_from_text_rejects_garbage():
    with pytest.raises(ParseError):
        path_from_text("not-a-step")
    with pytest.raises(ParseError):
        path_from_text("a/b/c/??")
    with pytest.raises(ParseError):
        path_from_text("")


# ----------------------------------------------------------------- index


def test_index_add_get_and_counts():
    index = PathIndex()
    path = DependencyPath((PathEdge("X", "N", "r", "root"), PathEdge("Y", "N", "d", "down")))
    index.add("Cat", "Mouse", path, 2)
    index.add("cat", "mouse", path)
    assert index.get("CAT", "MOUSE")[path] == 3
    assert index.total_count("cat", "mouse") == 3
    assert index.distinct_count("cat", "mouse") == 1
    assert index.get("mouse", "cat") == Counter()  # direction matters
    assert len(index) == 1


def test_index_get_returns_a_copy():
    index = PathIndex()
    path = DependencyPath((PathEdge("X", "N", "r", "root"),))
    index.add("a", "b", path)
    index.get("a", "b")[path] = 99
    assert index.get("a", "b")[path] == 1


def test_build_path_index_is_order_independent(cat_sentence):
    other = parse_conll(conll_text([
        ("mice", "mouse", "NOUN", 3, "nsubj"), ("were", "be", "VERB", 3, "cop"),
        ("chased", "chase", "VERB", 0, "root"), ("by", "by", "ADP", 5, "case"),
        ("cats", "cat", "NOUN", 3, "nmod"),
    ]))[0]
    pairs = [("cat", "mouse"), ("black", "gray")]
    a = build_path_index([cat_sentence, other], pairs)
    b = build_path_index([other, cat_sentence], pairs)
    assert a == b and len(a) == 2


def test_index_save_load_round_trip(tmp_path, cat_sentence):
    index = build_path_index([cat_sentence], [("cat", "mouse"), ("black", "gray"), ("cat", "dog")])
    target = tmp_path / "paths.tsv"
    save_index(index, target)
    assert load_index(target) == index
    # pairs without paths do not appear at all
    assert "dog" not in target.read_text()


def test_load_index_rejects_wrong_header(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("x\ty\tX/N/r^\t1\n")
    with pytest.raises(ParseError):
        load_index(bad)

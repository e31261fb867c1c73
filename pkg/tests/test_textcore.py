import pytest
from hypothesis import given, strategies as st

from textcf.exceptions import IndexOutOfRange, PositionConflict, UnknownToken
from textcf.textcore import (
    BinaryTextMatrix,
    Document,
    PerturbationMask,
    PosTag,
    apply_perturbation,
    detokenize,
    l0_distance,
    pos_tag,
    substitute,
    substitute_many,
    to_matrix,
    tokenize,
)


def test_tokenize_splits_clitics_and_punctuation():
    doc = tokenize("This is one of Polanski's best films.")
    assert doc.tokens == ("this", "is", "one", "of", "polanski", "'s", "best", "films", ".")
    assert doc.surface[0] == "This"


def test_tokenize_empty_and_whitespace():
    assert tokenize("").tokens == ()
    doc = tokenize("   ")
    assert len(doc) == 0 and doc.raw == "   "


def test_curly_apostrophe_normalised():
    assert tokenize("Polanski’s").tokens == ("polanski", "'s")


def test_raw_round_trips_exactly():
    text = "  Hello,   world!\tIt's  fine.\n"
    assert tokenize(text).raw == text


@given(st.text(max_size=60))
def test_raw_round_trip_property(text):
    assert tokenize(text).raw == text


def test_detokenize_attaches_clitics():
    assert detokenize(["polanski", "'s", "best"]) == "polanski's best"


def test_from_tokens():
    doc = Document.from_tokens(["a", "good", "film"])
    assert doc.tokens == ("a", "good", "film") and doc.raw == "a good film"


def test_substitute_keeps_original():
    doc = tokenize("one of Polanski's best films.")
    new = substitute(doc, 4, "worst")
    assert new.raw == "one of Polanski's worst films."
    assert doc.raw == "one of Polanski's best films."
    assert l0_distance(doc.tokens, new.tokens) == 1


def test_substitute_same_word_is_noop():
    doc = tokenize("a good film")
    assert substitute(doc, 1, "GOOD") is doc


def test_substitute_out_of_range():
    doc = tokenize("a good film")
    with pytest.raises(IndexOutOfRange):
        substitute(doc, 3, "bad")
    with pytest.raises(IndexOutOfRange):
        substitute_many(doc, {-1: "bad"})


def test_substitute_avoids_fusing_words():
    doc = tokenize("a,b")
    new = substitute(doc, 1, "word")
    assert new.tokens == ("a", "word", "b")
    assert tokenize(new.raw).tokens == new.tokens


def test_substitute_many_preserves_tags():
    doc = tokenize("a good film").with_tags([PosTag.OTHER, PosTag.ADJ, PosTag.NOUN])
    new = substitute_many(doc, {1: "bad", 2: "movie"})
    assert new.tags == doc.tags and new.tokens == ("a", "bad", "movie")


def test_l0_distance():
    assert l0_distance("abc", "abd") == 1
    with pytest.raises(ValueError):
        l0_distance("ab", "abc")


def test_pos_tag_priority(tiny_wn):
    doc = pos_tag(tokenize("the good dog run xyz"), tiny_wn)
    assert doc.tags == (PosTag.OTHER, PosTag.ADJ, PosTag.NOUN, PosTag.VERB, PosTag.OTHER)


def test_postag_from_wordnet_satellite():
    assert PosTag.from_wordnet("s") is PosTag.ADJ


def test_binary_matrix_round_trip():
    vocab = ["a", "good", "bad", "film"]
    m = to_matrix(tokenize("a good film"), vocab)
    assert m.words() == ["a", "good", "film"]
    assert m.to_dense().sum() == 3


def test_binary_matrix_rejects_two_words_per_position():
    with pytest.raises(PositionConflict):
        BinaryTextMatrix(("a", "b"), frozenset({(0, 0), (1, 0)}), 1)


def test_to_matrix_unknown_token():
    with pytest.raises(UnknownToken):
        to_matrix(tokenize("a weird film"), ["a", "film"])


def test_apply_perturbation_swaps_word():
    vocab = ["a", "good", "bad", "film"]
    x = to_matrix(tokenize("a good film"), vocab)
    z = apply_perturbation(x, PerturbationMask({(1, 1): -1, (2, 1): 1}))
    assert z.words() == ["a", "bad", "film"]


def test_apply_perturbation_clips():
    vocab = ["a", "good"]
    x = to_matrix(tokenize("a good"), vocab)
    z = apply_perturbation(x, PerturbationMask({(0, 0): 1, (1, 0): -1}))
    assert z.words() == ["a", "good"]


def test_apply_perturbation_conflict_and_range():
    vocab = ["a", "good", "bad"]
    x = to_matrix(tokenize("a good"), vocab)
    with pytest.raises(PositionConflict):
        apply_perturbation(x, PerturbationMask({(2, 1): 1}))
    with pytest.raises(IndexError):
        apply_perturbation(x, PerturbationMask({(5, 0): 1}))


def test_perturbation_values_checked():
    with pytest.raises(ValueError):
        PerturbationMask({(0, 0): 2})


@given(
    st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=8),
    st.data(),
)
def test_perturbation_zero_is_identity(tokens, data):
    vocab = ["a", "b", "c", "d"]
    x = to_matrix(Document.from_tokens(tokens), vocab)
    keys = data.draw(st.lists(st.tuples(st.integers(0, 3), st.integers(0, len(tokens) - 1))))
    assert apply_perturbation(x, PerturbationMask({k: 0 for k in keys})) == x

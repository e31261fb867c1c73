import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from textcf.embedspace import VectorStore, cosine_similarity, lm_simwords, load_vectors, sentence_vector
from textcf.exceptions import EmptyFile, MissingFile, ParseError, UnknownWord
from textcf.textcore import PosTag, tokenize


def test_cosines_from_fixture(tiny_vectors):
    assert cosine_similarity(tiny_vectors, "good", "great") == pytest.approx(0.92, abs=1e-12)
    assert cosine_similarity(tiny_vectors, "good", "bad") == pytest.approx(0.85, abs=1e-12)
    assert cosine_similarity(tiny_vectors, "good", "good") == pytest.approx(1.0)


def test_threshold_neighbours(tiny_vectors):
    assert lm_simwords(tiny_vectors, "good", PosTag.ADJ, 0.9) == {"great"}
    assert lm_simwords(tiny_vectors, "good", PosTag.ADJ, 0.85) == {"great", "bad"}
    assert lm_simwords(tiny_vectors, "good", PosTag.ADJ, 0.95) == frozenset()


def test_unknown_word(tiny_vectors):
    with pytest.raises(UnknownWord):
        lm_simwords(tiny_vectors, "zebra", PosTag.ADJ, 0.5)


def test_theta_range(tiny_vectors):
    with pytest.raises(ValueError):
        lm_simwords(tiny_vectors, "good", PosTag.ADJ, 1.5)


def test_pos_filter(tiny_vectors):
    tags = {"great": PosTag.ADJ, "bad": PosTag.NOUN}
    tagger = lambda w: tags.get(w, PosTag.OTHER)  # noqa: E731
    assert lm_simwords(tiny_vectors, "good", PosTag.ADJ, 0.8, tagger) == {"great"}
    # OTHER query word: no filtering
    assert lm_simwords(tiny_vectors, "good", PosTag.OTHER, 0.8, tagger) == {"great", "bad"}


def test_sentence_vector_cosine(tiny_vectors):
    # films = (0,0,1), movie = (0,.6,.8): cosine 0.8
    a = sentence_vector(tiny_vectors, tokenize("films"))
    b = sentence_vector(tiny_vectors, tokenize("movie zzz"))
    assert float(a @ b) == pytest.approx(0.8)


def test_sentence_vector_oov(tiny_vectors):
    vec, oov = sentence_vector(tiny_vectors, tokenize("zzz qqq"), return_oov=True)
    assert oov and not vec.any()


def test_load_vectors_errors(tmp_path):
    p = tmp_path / "v.txt"
    with pytest.raises(MissingFile):
        load_vectors(p)
    p.write_text("")
    with pytest.raises(EmptyFile):
        load_vectors(p)
    p.write_text("a 1 0\nb 1\n")
    with pytest.raises(ParseError) as exc:
        load_vectors(p)
    assert exc.value.line == 2
    p.write_text("a 1 x\n")
    with pytest.raises(ParseError):
        load_vectors(p)
    p.write_text("a 0 0\n")
    with pytest.raises(ParseError):
        load_vectors(p)
    p.write_text("a nan 1\n")
    with pytest.raises(ParseError):
        load_vectors(p)


def test_load_vectors_header_optional(tmp_path):
    p = tmp_path / "v.txt"
    p.write_text("a 3 4\nb 0 1\n")
    store = load_vectors(p)
    assert store.dim == 2 and np.allclose(store.vector("a"), [0.6, 0.8])


def test_duplicate_words_keep_first(tmp_path):
    p = tmp_path / "v.txt"
    p.write_text("a 1 0\na 0 1\n")
    with pytest.warns(UserWarning):
        store = load_vectors(p)
    assert len(store) == 1 and np.allclose(store.vector("a"), [1, 0])


def test_polarity_vectors_separate_polar_adjectives(polarity_vectors):
    # positives are close to each other, negatives come next, others further
    great = lm_simwords(polarity_vectors, "great", PosTag.ADJ, 0.9)
    assert {"good", "best", "excellent"} <= great
    assert not great & {"bad", "worst", "awful"}


def test_concurrent_queries_agree(polarity_vectors):
    words = list(polarity_vectors.words)
    expected = {w: lm_simwords(polarity_vectors, w, PosTag.OTHER, 0.5) for w in words}
    store = VectorStore(polarity_vectors.words, polarity_vectors.matrix)
    results = {}

    def work(chunk):
        for w in chunk:
            results[w] = lm_simwords(store, w, PosTag.OTHER, 0.5)

    threads = [threading.Thread(target=work, args=(words[i::4],)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_threshold_monotone(seed, a, b):
    rng = np.random.default_rng(seed)
    words = [f"w{i}" for i in range(12)]
    store = VectorStore(words, rng.normal(size=(12, 4)))
    lo, hi = min(a, b), max(a, b)
    assert lm_simwords(store, "w0", PosTag.OTHER, hi) <= lm_simwords(store, "w0", PosTag.OTHER, lo)
    # brute-force oracle
    expected = {w for w in words[1:] if store.vector("w0") @ store.vector(w) >= lo}
    assert lm_simwords(store, "w0", PosTag.OTHER, lo) == expected


def test_zero_vector_rejected():
    with pytest.raises(ValueError):
        VectorStore(["a"], [[0.0, 0.0]])
    assert math.isclose(float(np.linalg.norm(VectorStore(["a"], [[3.0, 4.0]]).vector("a"))), 1.0)

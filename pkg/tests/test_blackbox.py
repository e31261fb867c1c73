import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone
from sklearn.feature_extraction.text import CountVectorizer, TfidfVectorizer
from sklearn.naive_bayes import MultinomialNB

from textcf.blackbox import (
    FunctionBlackBox,
    GradientLogisticRegression,
    LabeledCorpus,
    LaplaceNaiveBayes,
    ScoredFunctionBlackBox,
    TextBlackBox,
    TextVectorizer,
    fit_vectorizer,
    load_model,
    logistic_loss_grad,
    predict_one,
    save_model,
    split,
    train_logreg,
    train_naive_bayes,
)
from textcf.exceptions import CannotStratify, EmptyClass, EmptyCorpus, NotBinary, ParseError
from textcf.textcore import tokenize

DOCS = ["a good film", "a bad film", "good good plot", "bad plot and bad acting", "a film"]


def _sk_tokens(text):
    return list(tokenize(text).tokens)


def test_count_vectorizer_matches_hand_counts():
    vec = TextVectorizer().fit(DOCS)
    assert list(vec.get_feature_names_out()) == sorted({t for d in DOCS for t in d.split()})
    row = vec.transform_one("good good film zzz")
    names = vec.get_feature_names_out()
    assert {names[c]: v for c, v in row.items()} == {"good": 2.0, "film": 1.0}


def test_tfidf_matches_formula():
    vec = TextVectorizer(mode="tfidf").fit(DOCS)
    n = len(DOCS)
    df_good = 2
    assert vec.idf_[vec.vocabulary_["good"]] == pytest.approx(math.log((1 + n) / (1 + df_good)) + 1)
    x = vec.transform(["good good plot"]).toarray()[0]
    assert np.linalg.norm(x) == pytest.approx(1.0)


def test_tfidf_matches_independent_implementation():
    ours = TextVectorizer(mode="tfidf").fit(DOCS).transform(DOCS).toarray()
    theirs = TfidfVectorizer(tokenizer=_sk_tokens, lowercase=False, token_pattern=None).fit_transform(DOCS)
    assert np.allclose(ours, theirs.toarray(), atol=1e-12)


def test_count_matches_independent_implementation():
    ours = TextVectorizer().fit(DOCS).transform(DOCS).toarray()
    theirs = CountVectorizer(tokenizer=_sk_tokens, lowercase=False, token_pattern=None).fit_transform(DOCS)
    assert np.array_equal(ours, theirs.toarray())


def test_naive_bayes_hand_example():
    # two one-word docs per class; vocabulary {good, bad}
    vec = TextVectorizer().fit(["good", "bad"])
    X = vec.transform(["good", "good", "bad", "bad"])
    y = np.array([1, 1, 0, 0])
    nb = LaplaceNaiveBayes().fit(X, y)
    # class 1: counts good=2, bad=0 -> P(good|1) = 3/4
    assert math.exp(nb.feature_log_prob_[1, vec.vocabulary_["good"]]) == pytest.approx(0.75)
    assert nb.predict(X).tolist() == [1, 1, 0, 0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_naive_bayes_matches_independent_implementation(seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 4, size=(20, 6)).astype(float)
    y = np.array([0, 1] * 10)
    ours = LaplaceNaiveBayes(alpha=1.0).fit(X, y)
    theirs = MultinomialNB(alpha=1.0).fit(X, y)
    assert np.allclose(ours.predict_proba(X), theirs.predict_proba(X), atol=1e-10)
    assert np.allclose(ours.predict_proba(X).sum(axis=1), 1.0)


def test_gradient_central_differences():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(8, 5))
    y = rng.integers(0, 2, 8).astype(float)
    w, b = rng.normal(size=5), 0.3
    _, gw, gb = logistic_loss_grad(w, b, X, y, 0.1)
    h = 1e-6
    for j in range(5):
        e = np.zeros(5)
        e[j] = h
        num = (logistic_loss_grad(w + e, b, X, y, 0.1)[0] - logistic_loss_grad(w - e, b, X, y, 0.1)[0]) / (2 * h)
        assert num == pytest.approx(gw[j], rel=1e-6, abs=1e-9)
    num_b = (logistic_loss_grad(w, b + h, X, y, 0.1)[0] - logistic_loss_grad(w, b - h, X, y, 0.1)[0]) / (2 * h)
    assert num_b == pytest.approx(gb, rel=1e-6, abs=1e-9)


def test_logreg_loss_decreases_and_separates():
    X = TextVectorizer(mode="tfidf").fit(DOCS).transform(["good film", "bad film"] * 5)
    y = np.array([1, 0] * 5)
    clf = GradientLogisticRegression(epochs=200, lr=0.5).fit(X, y)
    assert clf.loss_curve_[-1] < clf.loss_curve_[0]
    assert all(a >= b - 1e-12 for a, b in zip(clf.loss_curve_, clf.loss_curve_[1:]))
    assert clf.predict(X).tolist() == y.tolist()


def test_logreg_needs_two_classes():
    with pytest.raises(NotBinary):
        GradientLogisticRegression().fit(np.eye(3), [0, 1, 2])


def test_estimator_params_round_trip():
    clf = GradientLogisticRegression(epochs=5, lr=0.2)
    assert clf.get_params() == {"epochs": 5, "lr": 0.2, "l2": 1e-4}
    assert clone(clf).get_params() == clf.get_params()
    assert TextVectorizer(mode="tfidf").get_params()["mode"] == "tfidf"


def _corpus():
    docs = [tokenize(t) for t in ["good film", "bad film", "great plot", "awful plot"] * 5]
    return LabeledCorpus(docs, [1, 0, 1, 0] * 5, ("neg", "pos"))


def test_split_is_stratified_and_seeded():
    corpus = _corpus()
    tr, te = split(corpus, 0.7, seed=3)
    assert len(tr) == 14 and len(te) == 6
    assert set(tr.labels) == set(te.labels) == {0, 1}
    tr2, _ = split(corpus, 0.7, seed=3)
    assert [d.tokens for d in tr.documents] == [d.tokens for d in tr2.documents]


def test_split_errors():
    one_class = LabeledCorpus([tokenize("a")] * 4, [0] * 4, ("x",))
    with pytest.raises(CannotStratify):
        split(one_class)
    with pytest.raises(ValueError):
        split(_corpus(), 1.0)


def test_train_errors():
    empty = LabeledCorpus([], [], ("neg", "pos"))
    with pytest.raises(EmptyCorpus):
        fit_vectorizer(empty)
    only_pos = LabeledCorpus([tokenize("good")], [1], ("neg", "pos"))
    with pytest.raises(EmptyClass):
        train_naive_bayes(only_pos, fit_vectorizer(only_pos))


def test_text_blackbox_end_to_end():
    corpus = _corpus()
    bb = train_naive_bayes(corpus, fit_vectorizer(corpus))
    assert bb.predict(["good film", "awful plot"]).tolist() == [1, 0]
    pred = predict_one(bb, "good film")
    assert pred.label == 1 and len(pred.scores) == 2


@pytest.mark.parametrize("trainer", [train_naive_bayes, train_logreg])
def test_model_save_load_identical(tmp_path, trainer):
    corpus = _corpus()
    bb = trainer(corpus, fit_vectorizer(corpus, mode="tfidf"))
    save_model(bb, tmp_path / "a.json")
    again = load_model(tmp_path / "a.json")
    docs = ["good film", "awful plot", "unknown words"]
    assert np.allclose(bb.predict_proba(docs), again.predict_proba(docs))
    save_model(again, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_load_model_rejects_garbage(tmp_path):
    p = tmp_path / "m.json"
    p.write_text("{}")
    with pytest.raises(ParseError):
        load_model(p)
    p.write_text("{oops")
    with pytest.raises(ParseError):
        load_model(p)


def test_function_blackboxes():
    f = FunctionBlackBox(lambda d: int("good" in d.tokens))
    assert f.predict(["good", "bad"]).tolist() == [1, 0]
    g = ScoredFunctionBlackBox(lambda d: [0.2, 0.8] if "good" in d.tokens else [0.7, 0.3])
    assert g.predict(["good", "bad"]).tolist() == [1, 0]
    assert predict_one(g, "good").scores == (0.2, 0.8)
    assert predict_one(f, "good").scores is None


def test_synthetic_dataset_is_separable(polarity_split):
    tr, te = polarity_split
    bb = train_naive_bayes(tr, fit_vectorizer(tr))
    assert (bb.predict(te.documents) == np.array(te.labels)).mean() == 1.0
    assert isinstance(bb, TextBlackBox)

"""Reference black-box text classifiers.

Everything here follows the scikit-learn estimator conventions (``fit``
returns ``self``, learned attributes end in ``_``, ``get_params`` works) so
the pieces drop into sklearn tooling. The explanation code only relies on
the small :class:`BlackBox` protocol: a batched ``predict`` over documents,
an optional ``predict_proba`` and a ``concurrent_safe`` flag.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence, runtime_checkable

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import CannotStratify, EmptyClass, EmptyCorpus, NotBinary, ParseError
from .textcore import Document
from .validation import check_document, check_documents, check_fraction

__all__ = [
    "LabeledCorpus",
    "Prediction",
    "BlackBox",
    "TextVectorizer",
    "LaplaceNaiveBayes",
    "GradientLogisticRegression",
    "TextBlackBox",
    "FunctionBlackBox",
    "ScoredFunctionBlackBox",
    "logistic_loss_grad",
    "fit_vectorizer",
    "train_naive_bayes",
    "train_logreg",
    "split",
    "predict_one",
    "predict_labels",
    "has_scores",
    "save_model",
    "load_model",
    "MODEL_FORMAT_VERSION",
]

MODEL_FORMAT_VERSION = 1


@dataclass
class LabeledCorpus:
    documents: list
    labels: list
    classes: tuple = ()

    def __post_init__(self):
        if len(self.documents) != len(self.labels):
            raise ValueError("documents and labels differ in length")
        self.labels = [int(y) for y in self.labels]
        if not self.classes:
            self.classes = tuple(str(c) for c in sorted(set(self.labels)))

    def __len__(self):
        return len(self.documents)

    def subset(self, indices) -> "LabeledCorpus":
        return LabeledCorpus(
            [self.documents[i] for i in indices], [self.labels[i] for i in indices], self.classes
        )

    def class_counts(self) -> dict:
        counts = {name: 0 for name in self.classes}
        for y in self.labels:
            counts[self.classes[y]] += 1
        return counts


@dataclass(frozen=True)
class Prediction:
    label: int
    scores: Optional[tuple] = field(default=None)

    def __post_init__(self):
        if self.scores is not None and int(np.argmax(self.scores)) != self.label:
            raise ValueError("label must be the argmax of scores")


@runtime_checkable
class BlackBox(Protocol):
    concurrent_safe: bool

    def predict(self, X: Sequence[Document]) -> np.ndarray: ...


def has_scores(f) -> bool:
    return callable(getattr(f, "predict_proba", None))


def predict_labels(f, docs: Sequence[Document]) -> np.ndarray:
    return np.asarray(f.predict(list(docs)))


def predict_one(f, doc) -> Prediction:
    """Single-document prediction with scores when the black box has them."""
    doc = check_document(doc)
    if has_scores(f):
        proba = np.asarray(f.predict_proba([doc]))[0]
        return Prediction(int(np.argmax(proba)), tuple(float(p) for p in proba))
    return Prediction(int(predict_labels(f, [doc])[0]))


class FunctionBlackBox:
    """Wrap a plain ``doc -> label`` function as a label-only black box."""

    def __init__(self, label_fn: Callable, concurrent_safe=True):
        self.label_fn = label_fn
        self.concurrent_safe = concurrent_safe

    def predict(self, X):
        return np.array([int(self.label_fn(check_document(x))) for x in X], dtype=np.int64)


class ScoredFunctionBlackBox(FunctionBlackBox):
    """Wrap a ``doc -> class scores`` function; labels are the argmax."""

    def __init__(self, score_fn: Callable, concurrent_safe=True):
        super().__init__(lambda doc: int(np.argmax(score_fn(doc))), concurrent_safe)
        self.score_fn = score_fn

    def predict_proba(self, X):
        return np.array([self.score_fn(check_document(x)) for x in X], dtype=np.float64)


class TextVectorizer(TransformerMixin, BaseEstimator):
    """Bag-of-words features, raw counts or smoothed, L2-normalised tf-idf.

    ``idf(t) = ln((1 + N) / (1 + df(t))) + 1``. Tokens unseen during ``fit``
    are dropped by ``transform``.
    """

    def __init__(self, mode="count", min_df=1):
        self.mode = mode
        self.min_df = min_df

    def fit(self, X, y=None):
        if self.mode not in ("count", "tfidf"):
            raise ValueError(f"mode must be 'count' or 'tfidf', got {self.mode!r}")
        docs = check_documents(X)
        if not docs:
            raise EmptyCorpus("cannot fit a vectorizer on zero documents")
        df = {}
        for doc in docs:
            for tok in set(doc.tokens):
                df[tok] = df.get(tok, 0) + 1
        vocab = sorted(t for t, c in df.items() if c >= self.min_df)
        self.vocabulary_ = {t: i for i, t in enumerate(vocab)}
        n = len(docs)
        self.idf_ = np.array([math.log((1 + n) / (1 + df[t])) + 1.0 for t in vocab])
        self.n_docs_ = n
        return self

    def transform_one(self, doc) -> dict:
        """Sparse ``column -> value`` map for one document."""
        return dict(zip(*self._row(check_document(doc))))

    def _row(self, doc):
        check_is_fitted(self, "vocabulary_")
        counts = {}
        vocab = self.vocabulary_
        for tok in doc.tokens:
            col = vocab.get(tok)
            if col is not None:
                counts[col] = counts.get(col, 0) + 1
        cols = list(counts)
        vals = np.array([counts[c] for c in cols], dtype=np.float64)
        if self.mode == "tfidf" and cols:
            vals = vals * self.idf_[cols]
            vals /= np.linalg.norm(vals)
        return cols, vals

    def transform(self, X):
        docs = check_documents(X)
        indptr, indices, data = [0], [], []
        for doc in docs:
            cols, vals = self._row(doc)
            indices.extend(cols)
            data.append(vals)
            indptr.append(len(indices))
        data = np.concatenate(data) if data else np.zeros(0)
        return sp.csr_matrix(
            (data, np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
            shape=(len(docs), len(self.vocabulary_)),
        )

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vocabulary_")
        return np.array(sorted(self.vocabulary_, key=self.vocabulary_.get), dtype=object)


class LaplaceNaiveBayes(ClassifierMixin, BaseEstimator):
    """Multinomial naive Bayes with additive smoothing."""

    def __init__(self, alpha=1.0):
        self.alpha = alpha

    def fit(self, X, y):
        X, y = check_X_y(X, y, accept_sparse="csr")
        if X.min() < 0:
            raise ValueError("naive Bayes needs non-negative features")
        self.classes_ = np.unique(y)
        counts = np.vstack([np.asarray(X[y == c].sum(axis=0)).ravel() for c in self.classes_])
        smoothed = counts + self.alpha
        self.feature_log_prob_ = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
        class_count = np.array([(y == c).sum() for c in self.classes_], dtype=np.float64)
        self.class_log_prior_ = np.log(class_count) - np.log(class_count.sum())
        self.n_features_in_ = X.shape[1]
        return self

    def _joint_log_likelihood(self, X):
        check_is_fitted(self, "feature_log_prob_")
        X = check_array(X, accept_sparse="csr")
        return np.asarray(X @ self.feature_log_prob_.T) + self.class_log_prior_

    def predict_log_proba(self, X):
        jll = self._joint_log_likelihood(X)
        m = jll.max(axis=1, keepdims=True)
        return jll - (m + np.log(np.exp(jll - m).sum(axis=1, keepdims=True)))

    def predict_proba(self, X):
        return np.exp(self.predict_log_proba(X))

    def predict(self, X):
        return self.classes_[np.argmax(self._joint_log_likelihood(X), axis=1)]


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_loss_grad(w, b, X, y, l2):
    """Mean log-loss plus ``l2/2 * |w|^2`` and its gradient in ``(w, b)``.

    ``y`` holds 0/1 targets; the intercept is not penalised.
    """
    z = np.asarray(X @ w).ravel() + b
    n = len(y)
    # log(1 + e^z) - y z, computed stably
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))
    resid = _sigmoid(z) - y
    grad_w = np.asarray(X.T @ resid).ravel() / n + l2 * w
    grad_b = float(resid.sum() / n)
    return loss, grad_w, grad_b


class GradientLogisticRegression(ClassifierMixin, BaseEstimator):
    """Binary logistic regression fitted by full-batch gradient descent."""

    def __init__(self, epochs=300, lr=0.1, l2=1e-4):
        self.epochs = epochs
        self.lr = lr
        self.l2 = l2

    def fit(self, X, y):
        X, y = check_X_y(X, y, accept_sparse="csr")
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise NotBinary(f"logistic regression needs exactly 2 classes, got {len(self.classes_)}")
        target = (y == self.classes_[1]).astype(np.float64)
        w = np.zeros(X.shape[1])
        b = 0.0
        losses = []
        for _ in range(self.epochs):
            loss, gw, gb = logistic_loss_grad(w, b, X, target, self.l2)
            losses.append(loss)
            w = w - self.lr * gw
            b = b - self.lr * gb
        losses.append(logistic_loss_grad(w, b, X, target, self.l2)[0])
        self.coef_ = w
        self.intercept_ = b
        self.loss_curve_ = losses
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, accept_sparse="csr")
        return np.asarray(X @ self.coef_).ravel() + self.intercept_

    def predict_proba(self, X):
        p = _sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


class TextBlackBox(ClassifierMixin, BaseEstimator):
    """Vectorizer + classifier acting on documents.

    Prediction is read-only on fitted arrays, so concurrent calls are safe.
    """

    concurrent_safe = True

    def __init__(self, vectorizer=None, classifier=None, class_names=None):
        self.vectorizer = vectorizer
        self.classifier = classifier
        self.class_names = class_names

    def fit(self, X, y):
        docs = check_documents(X)
        vec = self.vectorizer if self.vectorizer is not None else TextVectorizer()
        if not hasattr(vec, "vocabulary_"):
            vec.fit(docs)
        self.vectorizer_ = vec
        clf = self.classifier if self.classifier is not None else LaplaceNaiveBayes()
        self.classifier_ = clf.fit(vec.transform(docs), np.asarray(y))
        self.classes_ = self.classifier_.classes_
        return self

    def _features(self, X):
        check_is_fitted(self, "classifier_")
        return self.vectorizer_.transform(check_documents(X))

    def predict(self, X):
        return self.classifier_.predict(self._features(X))

    def predict_proba(self, X):
        return self.classifier_.predict_proba(self._features(X))


def fit_vectorizer(corpus: LabeledCorpus, mode="count") -> TextVectorizer:
    if len(corpus) == 0:
        raise EmptyCorpus("corpus is empty")
    return TextVectorizer(mode=mode).fit(corpus.documents)


def _check_classes(corpus: LabeledCorpus):
    counts = corpus.class_counts()
    empty = [name for name, c in counts.items() if c == 0]
    if empty:
        raise EmptyClass(f"no training documents for class(es) {empty}")


def train_naive_bayes(corpus: LabeledCorpus, vectorizer: TextVectorizer, alpha=1.0) -> TextBlackBox:
    if len(corpus) == 0:
        raise EmptyCorpus("corpus is empty")
    _check_classes(corpus)
    bb = TextBlackBox(vectorizer, LaplaceNaiveBayes(alpha=alpha), list(corpus.classes))
    return bb.fit(corpus.documents, corpus.labels)


def train_logreg(corpus: LabeledCorpus, vectorizer: TextVectorizer, epochs=300, lr=0.1, l2=1e-4) -> TextBlackBox:
    if len(corpus) == 0:
        raise EmptyCorpus("corpus is empty")
    if len(corpus.classes) != 2 or len(set(corpus.labels)) != 2:
        raise NotBinary("logistic regression needs a two-class corpus")
    clf = GradientLogisticRegression(epochs=epochs, lr=lr, l2=l2)
    return TextBlackBox(vectorizer, clf, list(corpus.classes)).fit(corpus.documents, corpus.labels)


def split(corpus: LabeledCorpus, train_fraction=0.7, seed=42, max_tries=100):
    """Seeded shuffle split keeping every class on both sides.

    Up to ``max_tries`` consecutive seeds are tried before giving up.
    """
    check_fraction(train_fraction, "train_fraction")
    n = len(corpus)
    present = set(corpus.labels)
    if len(present) < 2:
        raise CannotStratify("need at least two classes to split")
    n_train = int(round(train_fraction * n))
    if n_train < 1 or n_train >= n:
        raise CannotStratify(f"cannot split {n} documents at fraction {train_fraction}")
    labels = np.asarray(corpus.labels)
    for attempt in range(max_tries):
        perm = np.random.default_rng(seed + attempt).permutation(n)
        train, test = perm[:n_train], perm[n_train:]
        if set(labels[train]) == present and set(labels[test]) == present:
            return corpus.subset(train.tolist()), corpus.subset(test.tolist())
    raise CannotStratify(f"no stratified split found in {max_tries} draws")


# -- persistence -------------------------------------------------------------


def save_model(bb: TextBlackBox, path) -> None:
    """Write a fitted black box as versioned JSON (byte-stable for equal models)."""
    check_is_fitted(bb, "classifier_")
    vec, clf = bb.vectorizer_, bb.classifier_
    payload = {
        "format": "textcf-model",
        "version": MODEL_FORMAT_VERSION,
        "class_names": list(bb.class_names) if bb.class_names is not None else None,
        "classes": [int(c) for c in bb.classes_],
        "vectorizer": {
            "mode": vec.mode,
            "min_df": vec.min_df,
            "n_docs": vec.n_docs_,
            "vocabulary": list(vec.get_feature_names_out()),
            "idf": vec.idf_.tolist(),
        },
    }
    if isinstance(clf, LaplaceNaiveBayes):
        payload["classifier"] = {
            "kind": "naive_bayes",
            "alpha": clf.alpha,
            "class_log_prior": clf.class_log_prior_.tolist(),
            "feature_log_prob": clf.feature_log_prob_.tolist(),
        }
    elif isinstance(clf, GradientLogisticRegression):
        payload["classifier"] = {
            "kind": "logreg",
            "epochs": clf.epochs,
            "lr": clf.lr,
            "l2": clf.l2,
            "coef": clf.coef_.tolist(),
            "intercept": clf.intercept_,
        }
    else:
        raise TypeError(f"cannot serialise classifier {type(clf).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path) -> TextBlackBox:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid model JSON ({exc.msg})", path, exc.lineno) from None
    if payload.get("format") != "textcf-model":
        raise ParseError("not a textcf model file", path)
    if payload.get("version") != MODEL_FORMAT_VERSION:
        raise ParseError(f"unsupported model version {payload.get('version')!r}", path)
    v = payload["vectorizer"]
    vec = TextVectorizer(mode=v["mode"], min_df=v["min_df"])
    vec.vocabulary_ = {t: i for i, t in enumerate(v["vocabulary"])}
    vec.idf_ = np.array(v["idf"], dtype=np.float64)
    vec.n_docs_ = v["n_docs"]
    c = payload["classifier"]
    classes = np.array(payload["classes"])
    if c["kind"] == "naive_bayes":
        clf = LaplaceNaiveBayes(alpha=c["alpha"])
        clf.class_log_prior_ = np.array(c["class_log_prior"])
        clf.feature_log_prob_ = np.array(c["feature_log_prob"])
    elif c["kind"] == "logreg":
        clf = GradientLogisticRegression(epochs=c["epochs"], lr=c["lr"], l2=c["l2"])
        clf.coef_ = np.array(c["coef"])
        clf.intercept_ = float(c["intercept"])
    else:
        raise ParseError(f"unknown classifier kind {c['kind']!r}", path)
    clf.classes_ = classes
    clf.n_features_in_ = len(vec.vocabulary_)
    bb = TextBlackBox(vec, clf, payload["class_names"])
    bb.vectorizer_, bb.classifier_, bb.classes_ = vec, clf, classes
    return bb

"""Input coercion and argument checks shared by the estimators."""
from __future__ import annotations

from typing import Iterable

from .textcore import Document, tokenize


def check_document(x) -> Document:
    """Coerce a raw string, token sequence or Document into a Document."""
    if isinstance(x, Document):
        return x
    if isinstance(x, str):
        return tokenize(x)
    if isinstance(x, (list, tuple)) and all(isinstance(t, str) for t in x):
        return Document.from_tokens(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as a document")


def check_documents(X: Iterable) -> list:
    if isinstance(X, (str, Document)):
        raise TypeError("expected an iterable of documents, got a single document")
    return [check_document(x) for x in X]


def check_fraction(value, name="fraction", closed=False):
    lo_ok = value >= 0 if closed else value > 0
    hi_ok = value <= 1 if closed else value < 1
    if not (lo_ok and hi_ok):
        bounds = "[0, 1]" if closed else "(0, 1)"
        raise ValueError(f"{name} must lie in {bounds}, got {value!r}")
    return value


def check_positive_int(value, name):
    if int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)

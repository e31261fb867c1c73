"""Word-vector store with threshold neighbour queries and mean-pooled sentence vectors."""
from __future__ import annotations

import logging
import threading
import warnings
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .exceptions import EmptyFile, MissingFile, ParseError, UnknownWord
from .textcore import Document, PosTag

logger = logging.getLogger(__name__)

__all__ = ["VectorStore", "load_vectors", "cosine_similarity", "lm_simwords", "sentence_vector"]


class VectorStore:
    """Unit-normalised word vectors in file order.

    Neighbour rankings are computed once per query word and memoised; the
    cache only stores exact similarity values, so answers do not depend on
    whether it is warm.
    """

    def __init__(self, words, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ValueError("matrix must be (n_words, dim)")
        norms = np.linalg.norm(matrix, axis=1)
        if np.any(norms == 0):
            raise ValueError("zero vector cannot be normalised")
        self.words = list(words)
        self.matrix = matrix / norms[:, None]
        self.index = {w: i for i, w in enumerate(self.words)}
        self._ranked = {}
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def vector(self, word: str) -> np.ndarray:
        try:
            return self.matrix[self.index[word]]
        except KeyError:
            raise UnknownWord(word) from None

    def ranked_neighbours(self, word: str):
        """(word indices, similarities) of every other word, most similar first."""
        with self._lock:
            hit = self._ranked.get(word)
        if hit is not None:
            return hit
        i = self.index.get(word)
        if i is None:
            raise UnknownWord(word)
        sims = self.matrix @ self.matrix[i]
        order = np.argsort(-sims, kind="stable")
        order = order[order != i]
        hit = (order, sims[order])
        with self._lock:
            self._ranked[word] = hit
        return hit


def load_vectors(path) -> VectorStore:
    """Read the plain-text vector format.

    An optional ``count dim`` header line is followed by one word and ``dim``
    floats per line. Duplicate words keep their first vector.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"vector file not found: {path}")
    words, rows = [], []
    seen = set()
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split(" ")
            parts = [p for p in parts if p]
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                dim = int(parts[1])
                continue
            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise ParseError("line has no vector components", path, lineno)
            if len(values) != dim:
                raise ParseError(f"expected {dim} components, got {len(values)}", path, lineno)
            try:
                vec = np.array([float(v) for v in values])
            except ValueError as exc:
                raise ParseError(str(exc), path, lineno) from None
            if not np.all(np.isfinite(vec)):
                raise ParseError("non-finite vector component", path, lineno)
            if not np.any(vec):
                raise ParseError(f"zero vector for {word!r} cannot be normalised", path, lineno)
            if word in seen:
                warnings.warn(f"{path}:{lineno}: duplicate word {word!r} ignored", stacklevel=2)
                continue
            seen.add(word)
            words.append(word)
            rows.append(vec)
    if not words:
        raise EmptyFile("no vectors found", path)
    logger.info("loaded %d vectors of dim %d from %s", len(words), dim, path)
    return VectorStore(words, np.vstack(rows))


def cosine_similarity(store: VectorStore, a: str, b: str) -> float:
    return float(np.clip(store.vector(a) @ store.vector(b), -1.0, 1.0))


def lm_simwords(
    store: VectorStore,
    word: str,
    pos: PosTag,
    theta: float,
    tagger: Optional[Callable[[str], PosTag]] = None,
) -> frozenset:
    """Words whose cosine similarity to ``word`` is at least ``theta``.

    With a ``tagger``, candidates whose tag disagrees with ``pos`` are
    dropped, except untagged (OTHER) words, and no filtering happens when
    ``pos`` itself is OTHER.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    order, sims = store.ranked_neighbours(word)
    # sims is sorted descending
    cut = int(np.searchsorted(-sims, -theta, side="right"))
    out = set()
    for idx in order[:cut]:
        w = store.words[idx]
        if w == word:
            continue
        if tagger is not None and pos is not PosTag.OTHER:
            tag = tagger(w)
            if tag is not pos and tag is not PosTag.OTHER:
                continue
        out.add(w)
    return frozenset(out)


def sentence_vector(store: VectorStore, doc: Document, return_oov: bool = False):
    """Renormalised mean of the in-vocabulary token vectors.

    A document with no known token maps to the zero vector; pass
    ``return_oov=True`` to also get that flag.
    """
    rows = [store.index[t] for t in doc.tokens if t in store.index]
    if not rows:
        vec = np.zeros(store.dim)
        return (vec, True) if return_oov else vec
    vec = store.matrix[rows].mean(axis=0)
    norm = np.linalg.norm(vec)
    vec = vec / norm if norm > 0 else vec
    return (vec, False) if return_oov else vec

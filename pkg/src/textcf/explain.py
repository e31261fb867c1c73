"""Counterfactual search by word substitution.

``explore`` is the shared engine: every position gets a fixed set of
candidate replacements, then rounds ``r = 1, 2, ...`` each draw ``n`` fresh
copies of the target with exactly ``r`` distinct positions replaced, until
some copy changes the black-box label. The methods differ in where the
candidates come from and in how one counterfactual is picked:

* :func:`growing_net` - WordNet neighbours, best sentence Wu-Palmer score;
* :func:`growing_language` - embedding neighbours above a similarity
  threshold that is relaxed until something flips, fewest edits wins;
* :func:`sedc` - masking baseline (greedy on scores, subset search on labels);
* :func:`random_replacement` - unguided baseline.

The estimator classes at the bottom wrap these functions with
scikit-learn style parameters.
"""
from __future__ import annotations

import itertools
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .blackbox import has_scores, predict_labels
from .embedspace import VectorStore, lm_simwords, sentence_vector
from .exceptions import UnknownWord
from .textcore import Document, PosTag, pos_tag, substitute, substitute_many, tag_word
from .validation import check_document
from .wordnet import WordNetStore, wn_simwords, wu_palmer_sentence

__all__ = [
    "ExplainConfig",
    "ReplacementSets",
    "Counterfactual",
    "ExploreResult",
    "build_replacement_sets",
    "wordnet_provider",
    "embedding_provider",
    "explore",
    "growing_net",
    "growing_language",
    "sedc",
    "random_replacement",
    "GrowingNet",
    "GrowingLanguage",
    "SEDC",
    "RandomReplacement",
    "MASK_TOKEN",
]

MASK_TOKEN = "MASK"


@dataclass(frozen=True)
class ExplainConfig:
    n: int = 2000
    t: int = 1
    theta: float = 0.9
    tau: float = 0.02
    theta_min: float = 0.4
    seed: int = 42
    max_runtime: Optional[float] = None
    n_jobs: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if not 0.0 <= self.theta_min <= self.theta <= 1.0:
            raise ValueError("need 0 <= theta_min <= theta <= 1")
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        if self.max_runtime is not None and self.max_runtime <= 0:
            raise ValueError("max_runtime must be positive")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "theta": self.theta,
            "tau": self.tau,
            "theta_min": self.theta_min,
            "seed": self.seed,
            "max_runtime": self.max_runtime,
        }


@dataclass(frozen=True)
class ReplacementSets:
    sets: tuple
    provider: str = "CUSTOM"

    def __len__(self):
        return len(self.sets)

    @property
    def pool_size(self) -> int:
        return sum(len(s) for s in self.sets)


@dataclass(frozen=True)
class Counterfactual:
    document: Document
    modified_positions: frozenset
    original: Document = field(compare=False, repr=False)
    predicted_label: int = 0
    round_found: int = 0

    @property
    def text(self) -> str:
        return self.document.raw

    @property
    def n_edits(self) -> int:
        return len(self.modified_positions)

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "tokens": list(self.document.tokens),
            "modified_positions": sorted(self.modified_positions),
            "predicted_label": int(self.predicted_label),
            "round_found": int(self.round_found),
        }


@dataclass
class ExploreResult:
    counterfactuals: list
    replacement_sets: ReplacementSets
    original_label: int
    rounds: int = 0
    timed_out: bool = False

    def __iter__(self):
        return iter(self.counterfactuals)

    def __len__(self):
        return len(self.counterfactuals)

    def __bool__(self):
        return bool(self.counterfactuals)

    @property
    def pool_size(self) -> int:
        return self.replacement_sets.pool_size


def build_replacement_sets(x: Document, simwords: Callable, provider="CUSTOM") -> ReplacementSets:
    """Candidate words per position; a word never replaces itself."""
    if not x.is_tagged:
        raise ValueError("explore needs a POS-tagged document")
    sets = []
    for tok, tag in zip(x.tokens, x.tags):
        try:
            cands = set(simwords(tok, tag))
        except UnknownWord:
            cands = set()
        sets.append(tuple(sorted(c for c in cands if c.lower() != tok)))
    return ReplacementSets(tuple(sets), provider)


def wordnet_provider(store: WordNetStore, t: int = 1) -> Callable:
    def simwords(word, pos):
        if pos is PosTag.OTHER:
            return ()
        return wn_simwords(store, word, pos, t)

    return simwords


def embedding_provider(store: VectorStore, theta: float, lexicon: Optional[WordNetStore] = None) -> Callable:
    tagger = None if lexicon is None else (lambda w: tag_word(w, lexicon))

    def simwords(word, pos):
        return lm_simwords(store, word, pos, theta, tagger)

    return simwords


def _evaluate(f, docs: list, n_jobs: int = 1) -> np.ndarray:
    if not docs:
        return np.zeros(0, dtype=np.int64)
    if n_jobs > 1 and getattr(f, "concurrent_safe", False) and len(docs) > n_jobs:
        chunks = np.array_split(np.arange(len(docs)), n_jobs)
        with ThreadPoolExecutor(n_jobs) as pool:
            parts = pool.map(lambda idx: predict_labels(f, [docs[i] for i in idx]), chunks)
            return np.concatenate(list(parts))
    return predict_labels(f, docs)


def _deadline(config: ExplainConfig, start: Optional[float] = None) -> Optional[float]:
    if config.max_runtime is None:
        return None
    return (time.monotonic() if start is None else start) + config.max_runtime


def explore(
    x: Document,
    f,
    simwords: Callable,
    config: ExplainConfig = ExplainConfig(),
    *,
    provider: str = "CUSTOM",
    stream: int = 0,
    deadline: Optional[float] = None,
) -> ExploreResult:
    """Round-by-round random substitution search.

    Round ``r`` draws ``config.n`` copies of ``x``, each with ``r`` distinct
    replaceable positions swapped for uniformly drawn candidates, and keeps
    the copies ``f`` labels differently from ``x``. The search stops after the
    first round with a hit, after the last replaceable position count, or
    when ``deadline`` (a ``time.monotonic`` value) has passed.

    Randomness for round ``r`` comes from ``(config.seed, stream, r)`` only,
    so the result does not depend on how predictions are scheduled.
    """
    if deadline is None:
        deadline = _deadline(config)
    W = build_replacement_sets(x, simwords, provider)
    y0 = int(predict_labels(f, [x])[0])
    result = ExploreResult([], W, y0)
    replaceable = np.array([i for i, s in enumerate(W.sets) if s], dtype=np.int64)
    m = len(replaceable)
    if m == 0:
        return result
    sizes = np.array([len(W.sets[i]) for i in replaceable])
    r_max = min(len(x.tokens), m)
    found = {}
    r = 0
    while r < r_max and not found:
        if deadline is not None and time.monotonic() > deadline:
            result.timed_out = True
            break
        r += 1
        rng = np.random.default_rng([config.seed, stream, r])
        # the r smallest of m iid uniforms give a uniform r-subset
        keys = rng.random((config.n, m))
        chosen = np.argsort(keys, axis=1, kind="stable")[:, :r]
        picks = np.minimum((rng.random((config.n, r)) * sizes[chosen]).astype(np.int64), sizes[chosen] - 1)
        positions = replaceable[chosen]

        unique = {}
        for row_pos, row_pick in zip(positions.tolist(), picks.tolist()):
            edits = tuple(sorted((p, W.sets[p][k]) for p, k in zip(row_pos, row_pick)))
            if edits not in unique:
                unique[edits] = None
        keys_list = list(unique)
        docs = [substitute_many(x, dict(e)) for e in keys_list]
        labels = _evaluate(f, docs, config.n_jobs)
        for e, doc, label in zip(keys_list, docs, labels.tolist()):
            if label != y0 and doc.tokens not in found:
                found[doc.tokens] = Counterfactual(doc, frozenset(p for p, _ in e), x, int(label), r)
    result.rounds = r
    result.counterfactuals = [found[k] for k in sorted(found)]
    return result


def _confirm(f, cf: Optional[Counterfactual], y0: int) -> Optional[Counterfactual]:
    if cf is None:
        return None
    label = int(predict_labels(f, [cf.document])[0])
    if label == y0:
        raise RuntimeError("black box is not deterministic: counterfactual no longer flips")
    return cf


def _ensure_tagged(x, lexicon=None) -> Document:
    x = check_document(x)
    if x.is_tagged:
        return x
    if lexicon is not None:
        return pos_tag(x, lexicon)
    return x.with_tags([PosTag.OTHER] * len(x.tokens))


def growing_net(
    x: Document,
    f,
    store: WordNetStore,
    config: ExplainConfig = ExplainConfig(),
    info: Optional[dict] = None,
) -> Optional[Counterfactual]:
    """Explore with WordNet neighbours; return the most Wu-Palmer-similar hit.

    Ties go to fewer edits, then to the lexicographically smallest tokens.
    """
    x = _ensure_tagged(x, store)
    res = explore(x, f, wordnet_provider(store, config.t), config, provider="WORDNET")
    if info is not None:
        info.update(rounds=res.rounds, timed_out=res.timed_out, candidates=len(res), pool_size=res.pool_size)
    if not res:
        return None
    best = min(
        res.counterfactuals,
        key=lambda c: (-wu_palmer_sentence(store, c.document, x), c.n_edits, c.document.tokens),
    )
    return _confirm(f, best, res.original_label)


def relaxation_schedule(config: ExplainConfig) -> list:
    """Thresholds tried by :func:`growing_language`, strictly above ``theta_min``."""
    out = []
    k = 0
    theta = config.theta
    while theta > config.theta_min:
        out.append(theta)
        k += 1
        # recomputed from the start each step so no rounding error accumulates
        theta = round(config.theta - k * config.tau, 12)
    return out


def growing_language(
    x: Document,
    f,
    store: VectorStore,
    config: ExplainConfig = ExplainConfig(),
    lexicon: Optional[WordNetStore] = None,
    info: Optional[dict] = None,
) -> Optional[Counterfactual]:
    """Explore with embedding neighbours, relaxing the threshold until a flip.

    Among the hits the one with fewest changed tokens wins; ties go to the
    higher sentence-vector cosine, then to lexicographic token order.
    """
    x = _ensure_tagged(x, lexicon)
    deadline = _deadline(config)
    found = []
    pool_sizes = []
    thetas = []
    timed_out = False
    y0 = None
    for k, theta in enumerate(relaxation_schedule(config)):
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
        res = explore(
            x,
            f,
            embedding_provider(store, theta, lexicon),
            config,
            provider="EMBEDDING",
            stream=k,
            deadline=deadline,
        )
        y0 = res.original_label
        pool_sizes.append(res.pool_size)
        thetas.append(theta)
        found.extend(res.counterfactuals)
        timed_out = timed_out or res.timed_out
        if found or timed_out:
            break
    if info is not None:
        info.update(thetas=thetas, pool_sizes=pool_sizes, timed_out=timed_out, candidates=len(found))
    if not found:
        return None
    xv = sentence_vector(store, x)

    def key(c):
        cos = float(sentence_vector(store, c.document) @ xv)
        return (c.n_edits, -cos, c.document.tokens)

    return _confirm(f, min(found, key=key), y0)


def _class_column(f, label: int) -> int:
    classes = getattr(f, "classes_", None)
    if classes is None:
        return int(label)
    hits = np.flatnonzero(np.asarray(classes) == label)
    return int(hits[0]) if len(hits) else int(label)


def _mask(x: Document, positions: Iterable[int], mask_token: str) -> Document:
    return substitute_many(x, {p: mask_token for p in positions})


def sedc(
    x: Document,
    f,
    config: ExplainConfig = ExplainConfig(),
    mask_token: str = MASK_TOKEN,
    info: Optional[dict] = None,
) -> Optional[Counterfactual]:
    """Masking baseline.

    With class scores, greedily masks whichever token lowers the score of the
    original class the most, until the label changes. Without scores, tries
    mask sets of growing size (at most ``config.n`` per size) and returns the
    first that flips.
    """
    x = check_document(x)
    deadline = _deadline(config)
    y0 = int(predict_labels(f, [x])[0])
    maskable = [i for i, tok in enumerate(x.tokens) if tok != mask_token.lower()]
    path = "score" if has_scores(f) else "label"
    if info is not None:
        info.update(path=path, timed_out=False)
    if path == "score":
        col = _class_column(f, y0)
        current, masked = x, []
        remaining = list(maskable)
        while remaining:
            if deadline is not None and time.monotonic() > deadline:
                if info is not None:
                    info["timed_out"] = True
                return None
            trials = [_mask(current, [p], mask_token) for p in remaining]
            scores = np.asarray(f.predict_proba(trials))[:, col]
            best = int(np.argmin(scores))
            current = trials[best]
            masked.append(remaining.pop(best))
            label = int(predict_labels(f, [current])[0])
            if label != y0:
                cf = Counterfactual(current, frozenset(masked), x, label, len(masked))
                return _confirm(f, cf, y0)
        return None

    for k in range(1, len(maskable) + 1):
        if deadline is not None and time.monotonic() > deadline:
            if info is not None:
                info["timed_out"] = True
            return None
        if math.comb(len(maskable), k) <= config.n:
            subsets = list(itertools.combinations(maskable, k))
        else:
            rng = np.random.default_rng([config.seed, k])
            seen = set()
            for _ in range(20 * config.n):
                s = tuple(sorted(rng.choice(maskable, size=k, replace=False).tolist()))
                seen.add(s)
                if len(seen) >= config.n:
                    break
            subsets = sorted(seen)
        docs = [_mask(x, s, mask_token) for s in subsets]
        labels = _evaluate(f, docs, config.n_jobs)
        for s, doc, label in zip(subsets, docs, labels.tolist()):
            if label != y0:
                return _confirm(f, Counterfactual(doc, frozenset(s), x, int(label), k), y0)
    return None


def random_replacement(
    x: Document,
    f,
    vocabulary: Sequence[str],
    config: ExplainConfig = ExplainConfig(),
    info: Optional[dict] = None,
) -> Optional[Counterfactual]:
    """Unguided baseline: overwrite random positions with random vocabulary words.

    Positions are visited in a random order, each replaced by a word drawn
    uniformly from ``vocabulary``, until the label changes or every position
    has been replaced once.
    """
    x = check_document(x)
    vocab = sorted(set(vocabulary))
    y0 = int(predict_labels(f, [x])[0])
    rng = np.random.default_rng([config.seed, zlib.crc32(" ".join(x.tokens).encode("utf-8"))])
    current = x
    edited = []
    for step, pos in enumerate(rng.permutation(len(x.tokens)).tolist(), 1):
        choices = [w for w in vocab if w != x.tokens[pos]]
        if not choices:
            continue
        current = substitute(current, pos, choices[int(rng.integers(len(choices)))])
        edited.append(pos)
        label = int(predict_labels(f, [current])[0])
        if label != y0:
            return Counterfactual(current, frozenset(edited), x, label, step)
    return None


# -- estimator wrappers --------------------------------------------------------


class _Explainer(BaseEstimator):
    """Shared plumbing: ``fit`` is a no-op, ``transform`` maps texts to counterfactual texts."""

    def fit(self, X=None, y=None):
        self._config()
        return self

    def _config(self) -> ExplainConfig:
        params = self.get_params(deep=False)
        keys = ("n", "t", "theta", "tau", "theta_min", "seed", "max_runtime", "n_jobs")
        return ExplainConfig(**{k: params[k] for k in keys if k in params})

    def explain(self, x, info: Optional[dict] = None) -> Optional[Counterfactual]:
        """Counterfactual for one text, or ``None``; diagnostics go to ``info``."""
        raise NotImplementedError

    def transform(self, X) -> list:
        out = []
        for x in X:
            cf = self.explain(x)
            out.append(None if cf is None else cf.text)
        return out


class GrowingNet(_Explainer):
    def __init__(self, blackbox=None, wordnet=None, n=2000, t=1, seed=42, max_runtime=None, n_jobs=1):
        self.blackbox = blackbox
        self.wordnet = wordnet
        self.n = n
        self.t = t
        self.seed = seed
        self.max_runtime = max_runtime
        self.n_jobs = n_jobs

    def explain(self, x, info=None):
        self.last_info_ = info = {} if info is None else info
        return growing_net(x, self.blackbox, self.wordnet, self._config(), info=info)


class GrowingLanguage(_Explainer):
    def __init__(
        self,
        blackbox=None,
        vectors=None,
        lexicon=None,
        n=2000,
        theta=0.9,
        tau=0.02,
        theta_min=0.4,
        seed=42,
        max_runtime=None,
        n_jobs=1,
    ):
        self.blackbox = blackbox
        self.vectors = vectors
        self.lexicon = lexicon
        self.n = n
        self.theta = theta
        self.tau = tau
        self.theta_min = theta_min
        self.seed = seed
        self.max_runtime = max_runtime
        self.n_jobs = n_jobs

    def explain(self, x, info=None):
        self.last_info_ = info = {} if info is None else info
        return growing_language(
            x, self.blackbox, self.vectors, self._config(), lexicon=self.lexicon, info=info
        )


class SEDC(_Explainer):
    def __init__(self, blackbox=None, n=2000, seed=42, mask_token=MASK_TOKEN, max_runtime=None, n_jobs=1):
        self.blackbox = blackbox
        self.n = n
        self.seed = seed
        self.mask_token = mask_token
        self.max_runtime = max_runtime
        self.n_jobs = n_jobs

    def explain(self, x, info=None):
        self.last_info_ = info = {} if info is None else info
        return sedc(x, self.blackbox, self._config(), self.mask_token, info=info)


class RandomReplacement(_Explainer):
    def __init__(self, blackbox=None, vocabulary=(), seed=42):
        self.blackbox = blackbox
        self.vocabulary = vocabulary
        self.seed = seed

    def explain(self, x, info=None):
        self.last_info_ = info = {} if info is None else info
        return random_replacement(x, self.blackbox, self.vocabulary, self._config(), info=info)

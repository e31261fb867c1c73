"""Documents, tokenization, lexicon POS tagging and the binary text algebra.

A text of length ``d`` over a vocabulary ``V`` can be viewed as a sparse
``|V| x d`` binary matrix with a single set entry per position. Word-level
edits are then additive perturbations with entries in ``{-1, 0, +1}``
followed by clipping to ``[0, 1]``. The search code works on
:class:`Document` objects directly; the matrix form is kept so the algebra
stays checkable.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .exceptions import IndexOutOfRange, PositionConflict, UnknownToken

__all__ = [
    "PosTag",
    "Document",
    "BinaryTextMatrix",
    "PerturbationMask",
    "tokenize",
    "detokenize",
    "pos_tag",
    "tag_word",
    "to_matrix",
    "apply_perturbation",
    "substitute",
    "substitute_many",
    "l0_distance",
]


class PosTag(enum.Enum):
    NOUN = "n"
    VERB = "v"
    ADJ = "a"
    ADV = "r"
    OTHER = "o"

    @classmethod
    def from_wordnet(cls, code: str) -> "PosTag":
        # adjective satellites share the adjective index
        if code == "s":
            return cls.ADJ
        return cls(code)

    @property
    def wordnet_code(self) -> Optional[str]:
        return None if self is PosTag.OTHER else self.value


# tagging priority when a word appears in several indexes
TAG_PRIORITY = (PosTag.ADJ, PosTag.ADV, PosTag.VERB, PosTag.NOUN)

_APOSTROPHES = "'’"
# clitic ('s, 't, ...) only directly after an alphanumeric character
_TOKEN_RE = re.compile(
    rf"(?<=[^\W_])[{_APOSTROPHES}][^\W_]+|[^\W_]+|[^\s]",
)
_WORD_CHAR = re.compile(r"[^\W_]")


@dataclass(frozen=True)
class Document:
    """A tokenized text.

    ``tokens`` are lowercased for matching; ``surface`` keeps the original
    spelling of every token and ``spaces`` the whitespace that followed it,
    so the raw text can be rebuilt exactly. ``tags`` is ``None`` until the
    document goes through :func:`pos_tag`.
    """

    tokens: tuple
    surface: tuple
    spaces: tuple
    prefix: str = ""
    tags: Optional[tuple] = None

    def __post_init__(self):
        d = len(self.tokens)
        if len(self.surface) != d or len(self.spaces) != d:
            raise ValueError("tokens, surface and spaces must have equal length")
        if self.tags is not None and len(self.tags) != d:
            raise ValueError("tags must have one entry per token")

    @classmethod
    def from_tokens(cls, tokens: Iterable[str], tags=None) -> "Document":
        doc = tokenize(detokenize([str(t) for t in tokens]))
        return doc if tags is None else doc.with_tags(tags)

    @cached_property
    def raw(self) -> str:
        parts = [self.prefix]
        for s, sp in zip(self.surface, self.spaces):
            parts.append(s)
            parts.append(sp)
        return "".join(parts)

    def __len__(self):
        return len(self.tokens)

    @property
    def is_tagged(self) -> bool:
        return self.tags is not None

    def with_tags(self, tags: Sequence[PosTag]) -> "Document":
        return Document(self.tokens, self.surface, self.spaces, self.prefix, tuple(tags))

    def __str__(self):
        return self.raw


def tokenize(raw: str) -> Document:
    """Split ``raw`` into word, clitic and single punctuation tokens.

    >>> tokenize("Polanski's best films.").tokens
    ('polanski', "'s", 'best', 'films', '.')
    """
    matches = list(_TOKEN_RE.finditer(raw))
    if not matches:
        return Document((), (), (), raw)
    surface = [m.group(0) for m in matches]
    spaces = []
    for k, m in enumerate(matches):
        end = matches[k + 1].start() if k + 1 < len(matches) else len(raw)
        spaces.append(raw[m.end():end])
    prefix = raw[: matches[0].start()]
    tokens = tuple(s.lower().replace("’", "'") for s in surface)
    return Document(tokens, tuple(surface), tuple(spaces), prefix)


def _is_clitic(token: str) -> bool:
    return len(token) > 1 and token[0] in _APOSTROPHES


def detokenize(tokens: Sequence[str]) -> str:
    """Join tokens into a string that tokenizes back to the same tokens."""
    out = []
    for k, tok in enumerate(tokens):
        if k > 0 and not _is_clitic(tok):
            out.append(" ")
        out.append(tok)
    return "".join(out)


def tag_word(word: str, lexicon) -> PosTag:
    for pos in TAG_PRIORITY:
        if lexicon.has_lemma(word, pos):
            return pos
    return PosTag.OTHER


def pos_tag(doc: Document, lexicon) -> Document:
    """Tag every token by lexicon membership.

    ``lexicon`` needs a ``has_lemma(word, pos)`` method (a
    :class:`~textcf.wordnet.WordNetStore` does). A word found in several
    indexes takes the first of ADJ, ADV, VERB, NOUN; unknown words get OTHER.
    """
    return doc.with_tags([tag_word(tok, lexicon) for tok in doc.tokens])


def _needs_gap(left: str, right: str) -> bool:
    return bool(left) and bool(right) and bool(
        _WORD_CHAR.match(left[-1]) and _WORD_CHAR.match(right[0])
    )


def substitute_many(doc: Document, edits: Mapping[int, str]) -> Document:
    """Return a copy of ``doc`` with several positions replaced at once."""
    if not edits:
        return doc
    d = len(doc.tokens)
    tokens = list(doc.tokens)
    surface = list(doc.surface)
    spaces = list(doc.spaces)
    for pos, word in edits.items():
        if not 0 <= pos < d:
            raise IndexOutOfRange(f"position {pos} out of range for document of length {d}")
        tokens[pos] = word.lower()
        surface[pos] = word
    # keep replaced words from fusing with their neighbours
    for pos in edits:
        if pos > 0 and spaces[pos - 1] == "" and _needs_gap(surface[pos - 1], surface[pos]):
            spaces[pos - 1] = " "
        if pos + 1 < d and spaces[pos] == "" and _needs_gap(surface[pos], surface[pos + 1]):
            spaces[pos] = " "
    return Document(tuple(tokens), tuple(surface), tuple(spaces), doc.prefix, doc.tags)


def substitute(doc: Document, position: int, word: str) -> Document:
    """Replace the token at ``position`` with ``word``.

    The replacement is inserted in the form given (no re-casing). The input
    document is left untouched.
    """
    if not 0 <= position < len(doc):
        raise IndexOutOfRange(f"position {position} out of range for document of length {len(doc)}")
    if word.lower() == doc.tokens[position]:
        return doc
    return substitute_many(doc, {position: word})


def l0_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Number of positions at which two equal-length token sequences differ."""
    if len(a) != len(b):
        raise ValueError("L0 distance needs sequences of equal length")
    return sum(1 for x, y in zip(a, b) if x != y)


@dataclass(frozen=True)
class BinaryTextMatrix:
    """Sparse ``|vocab| x d`` binary matrix; entry ``(i, j)`` means word i at position j."""

    vocab: tuple
    entries: frozenset
    d: int

    def __post_init__(self):
        seen = set()
        for i, j in self.entries:
            if not (0 <= i < len(self.vocab) and 0 <= j < self.d):
                raise IndexError(f"entry {(i, j)} outside {len(self.vocab)}x{self.d}")
            if j in seen:
                raise PositionConflict(f"position {j} holds more than one word")
            seen.add(j)

    def to_dense(self):
        import numpy as np

        out = np.zeros((len(self.vocab), self.d), dtype=np.int8)
        for i, j in self.entries:
            out[i, j] = 1
        return out

    def words(self) -> list:
        """Word at each position, ``None`` where the position is empty."""
        out = [None] * self.d
        for i, j in self.entries:
            out[j] = self.vocab[i]
        return out


@dataclass(frozen=True)
class PerturbationMask:
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, v in self.entries.items():
            if v not in (-1, 0, 1):
                raise ValueError(f"perturbation value {v!r} at {key} not in {{-1, 0, 1}}")

    def __hash__(self):
        return hash(frozenset(self.entries.items()))


def to_matrix(doc: Document, vocab: Sequence[str]) -> BinaryTextMatrix:
    vocab = tuple(vocab)
    index = {}
    for i, w in enumerate(vocab):
        index.setdefault(w, i)
    entries = set()
    for j, tok in enumerate(doc.tokens):
        if tok not in index:
            raise UnknownToken(tok)
        entries.add((index[tok], j))
    return BinaryTextMatrix(vocab, frozenset(entries), len(doc.tokens))


def apply_perturbation(x: BinaryTextMatrix, eps: PerturbationMask) -> BinaryTextMatrix:
    """``z_ij = max(0, min(1, x_ij + eps_ij))``, checked for one word per position."""
    n_words = len(x.vocab)
    for i, j in eps.entries:
        if not (0 <= i < n_words and 0 <= j < x.d):
            raise IndexError(f"perturbation entry {(i, j)} outside {n_words}x{x.d}")
    z = set()
    for key in set(x.entries) | set(eps.entries):
        value = (1 if key in x.entries else 0) + eps.entries.get(key, 0)
        if max(0, min(1, value)) == 1:
            z.add(key)
    return BinaryTextMatrix(x.vocab, frozenset(z), x.d)

"""WordNet-style lexical graph: loading, neighbourhoods, Wu-Palmer similarity.

Two on-disk formats are understood:

* the Princeton WordNet 3.x database (``index.*`` / ``data.*`` text files),
* a compact JSON-lines fixture, one synset per line::

      {"id": "n00002", "pos": "n", "lemmas": ["dog"], "hypernyms": ["n00001"], "antonyms": []}

Depths follow the first-listed hypernym of every synset, so each synset has
exactly one primary chain up to a top synset of depth 1. Tops of one part of
speech hang under a virtual per-POS root, and those under one global root;
the virtual roots only matter for Wu-Palmer scores of synsets with no real
common ancestor.
"""
from __future__ import annotations

import json
import logging
import os
import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .exceptions import LengthMismatch, MissingFile, ParseError, UnknownSynset
from .textcore import Document, PosTag

logger = logging.getLogger(__name__)

__all__ = [
    "Synset",
    "WordNetStore",
    "load_wordnet",
    "load_fixture",
    "dump_fixture",
    "load_lexicon",
    "wn_simwords",
    "wu_palmer_synset",
    "wu_palmer_words",
    "wu_palmer_sentence",
]

POS_FILES = {"noun": PosTag.NOUN, "verb": PosTag.VERB, "adj": PosTag.ADJ, "adv": PosTag.ADV}
UNKNOWN_WORD_SCORE = 0.5

_SINGLE_TOKEN = re.compile(r"[^\W_]+")
_ADJ_MARKER = re.compile(r"\((a|p|ip)\)$")
_OFFSET = re.compile(r"\d{8}")


@dataclass
class Synset:
    id: str
    pos: PosTag
    lemmas: tuple
    hypernyms: tuple = ()
    hyponyms: tuple = ()
    antonyms: tuple = ()


@dataclass
class WordNetStore:
    """Read-only lexical graph built by :meth:`from_records`."""

    synsets: dict
    index: dict
    depth: dict
    _wup_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_records(cls, records: Iterable[dict], source=None, index_order=None) -> "WordNetStore":
        """Link raw synset records into a store.

        ``records`` carry ``id``, ``pos`` (a :class:`PosTag`), ``lemmas``,
        ``hypernyms``, ``antonyms`` and optionally ``hyponyms``. Edges are
        closed under inversion (hypernym/hyponym) and symmetry (antonym).
        """
        raw = {}
        for rec in records:
            sid = rec["id"]
            if sid in raw:
                raise ParseError(f"duplicate synset id {sid!r}", source, rec.get("_line"))
            raw[sid] = rec

        hyper = {sid: list(dict.fromkeys(r.get("hypernyms", ()))) for sid, r in raw.items()}
        hypo = {sid: list(dict.fromkeys(r.get("hyponyms", ()))) for sid, r in raw.items()}
        anto = {sid: list(dict.fromkeys(r.get("antonyms", ()))) for sid, r in raw.items()}
        for table, name in ((hyper, "hypernym"), (hypo, "hyponym"), (anto, "antonym")):
            for sid, targets in table.items():
                for tgt in targets:
                    if tgt not in raw:
                        raise ParseError(
                            f"{name} pointer from {sid} to unknown synset {tgt}",
                            source,
                            raw[sid].get("_line"),
                        )
        for sid in raw:
            for parent in hyper[sid]:
                if sid not in hypo[parent]:
                    hypo[parent].append(sid)
        for sid in raw:
            for child in hypo[sid]:
                if sid not in hyper[child]:
                    hyper[child].append(sid)
            for other in anto[sid]:
                if sid not in anto[other]:
                    anto[other].append(sid)

        synsets = {}
        for sid, rec in raw.items():
            lemmas = tuple(dict.fromkeys(str(l).lower() for l in rec["lemmas"]))
            if not lemmas:
                raise ParseError(f"synset {sid} has no lemmas", source, rec.get("_line"))
            synsets[sid] = Synset(
                sid, rec["pos"], lemmas, tuple(hyper[sid]), tuple(hypo[sid]), tuple(anto[sid])
            )

        index = {}
        for lemma, pos, sid in index_order or ():
            if sid not in synsets:
                raise ParseError(f"index entry {lemma!r} points to unknown synset {sid}", source)
            if lemma not in synsets[sid].lemmas:
                raise ParseError(f"index entry {lemma!r} not among lemmas of {sid}", source)
            ids = index.setdefault((lemma, pos), [])
            if sid not in ids:
                ids.append(sid)
        for sid, syn in synsets.items():
            for lemma in syn.lemmas:
                ids = index.setdefault((lemma, syn.pos), [])
                if sid not in ids:
                    ids.append(sid)
        index = {k: tuple(v) for k, v in index.items()}
        return cls(synsets, index, _primary_depths(synsets, source))

    # -- basic queries -------------------------------------------------

    def __contains__(self, sid):
        return sid in self.synsets

    def __len__(self):
        return len(self.synsets)

    def synset(self, sid: str) -> Synset:
        try:
            return self.synsets[sid]
        except KeyError:
            raise UnknownSynset(sid) from None

    def has_lemma(self, word: str, pos: PosTag) -> bool:
        return (word, pos) in self.index

    def synsets_for(self, word: str, pos: Optional[PosTag] = None) -> tuple:
        if pos is not None:
            return self.index.get((word, pos), ())
        out = []
        for p in (PosTag.NOUN, PosTag.VERB, PosTag.ADJ, PosTag.ADV):
            out.extend(self.index.get((word, p), ()))
        return tuple(out)

    def antonyms(self, word: str, pos: PosTag) -> set:
        """Lemmas of every synset linked by an antonym edge to a sense of ``word``."""
        out = set()
        for sid in self.synsets_for(word, pos):
            for other in self.synsets[sid].antonyms:
                out.update(self.synsets[other].lemmas)
        return out

    def primary_chain(self, sid: str) -> list:
        chain = [sid]
        while self.synsets[chain[-1]].hypernyms:
            chain.append(self.synsets[chain[-1]].hypernyms[0])
        return chain

    def stats(self) -> dict:
        hyper_edges = sum(len(s.hypernyms) for s in self.synsets.values())
        anto_edges = sum(len(s.antonyms) for s in self.synsets.values()) // 2
        per_pos = {}
        for s in self.synsets.values():
            per_pos[s.pos.name] = per_pos.get(s.pos.name, 0) + 1
        return {
            "synsets": len(self.synsets),
            "hypernym_edges": hyper_edges,
            "antonym_edges": anto_edges,
            "index_entries": len(self.index),
            "synsets_per_pos": dict(sorted(per_pos.items())),
            "max_depth": max(self.depth.values(), default=0),
        }


def _primary_depths(synsets: dict, source=None) -> dict:
    depth = {}
    for start in synsets:
        if start in depth:
            continue
        path = []
        on_path = set()
        node = start
        while node not in depth:
            if node in on_path:
                raise ParseError(f"hypernym cycle through {node}", source)
            on_path.add(node)
            path.append(node)
            parents = synsets[node].hypernyms
            if not parents:
                depth[node] = 1
                path.pop()
                break
            node = parents[0]
        for sid in reversed(path):
            depth[sid] = depth[synsets[sid].hypernyms[0]] + 1
    return depth


# -- loaders -------------------------------------------------------------


def _parse_data_line(line: str, path, lineno: int) -> dict:
    head = line.split("|", 1)[0].split()
    try:
        offset, _lexfile, ss_type = head[0], head[1], head[2]
        if not _OFFSET.fullmatch(offset):
            raise ParseError(f"bad synset offset {offset!r}", path, lineno)
        if ss_type not in ("n", "v", "a", "s", "r"):
            raise ParseError(f"bad synset type {ss_type!r}", path, lineno)
        pos = PosTag.from_wordnet(ss_type)
        w_cnt = int(head[3], 16)
        pos_i = 4
        lemmas = []
        for _ in range(w_cnt):
            word = head[pos_i]
            int(head[pos_i + 1], 16)
            lemmas.append(_ADJ_MARKER.sub("", word))
            pos_i += 2
        p_cnt = int(head[pos_i])
        pos_i += 1
        hypernyms, hyponyms, antonyms = [], [], []
        for _ in range(p_cnt):
            symbol, target, target_pos, _st = head[pos_i : pos_i + 4]
            if len(_st) != 4 or not _OFFSET.fullmatch(target):
                raise ParseError(f"malformed pointer {' '.join(head[pos_i:pos_i + 4])!r}", path, lineno)
            pos_i += 4
            tid = PosTag.from_wordnet(target_pos).value + target
            if symbol == "@":
                hypernyms.append(tid)
            elif symbol == "~":
                hyponyms.append(tid)
            elif symbol == "!":
                antonyms.append(tid)
    except ParseError:
        raise
    except (IndexError, ValueError) as exc:
        raise ParseError(f"truncated or malformed data line ({exc})", path, lineno) from None
    return {
        "id": pos.value + offset,
        "pos": pos,
        "lemmas": lemmas,
        "hypernyms": hypernyms,
        "hyponyms": hyponyms,
        "antonyms": antonyms,
        "_line": lineno,
    }


def _parse_index_line(line: str, path, lineno: int) -> list:
    f = line.split()
    try:
        lemma, pos_code = f[0].lower(), f[1]
        pos = PosTag.from_wordnet(pos_code)
        synset_cnt = int(f[2])
        p_cnt = int(f[3])
        i = 4 + p_cnt + 2
        offsets = f[i : i + synset_cnt]
        if len(offsets) != synset_cnt or len(f) != i + synset_cnt:
            raise ParseError(f"expected {synset_cnt} synset offsets", path, lineno)
    except ParseError:
        raise
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed index line ({exc})", path, lineno) from None
    for off in offsets:
        if not _OFFSET.fullmatch(off):
            raise ParseError(f"bad synset offset {off!r}", path, lineno)
    return [(lemma, pos, pos.value + off) for off in offsets]


def _content_lines(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            # license header lines start with two spaces
            if line.startswith("  ") or not line.strip():
                continue
            yield lineno, line.rstrip("\n")


def load_wordnet(path) -> WordNetStore:
    """Parse a Princeton WordNet 3.x database directory."""
    root = Path(path)
    if not root.is_dir():
        raise MissingFile(f"WordNet directory not found: {root}")
    for suffix in POS_FILES:
        for kind in ("index", "data"):
            if not (root / f"{kind}.{suffix}").is_file():
                raise MissingFile(f"missing {kind}.{suffix} in {root}")

    records = []
    index_order = []
    for suffix in POS_FILES:
        data_path = root / f"data.{suffix}"
        for lineno, line in _content_lines(data_path):
            records.append(_parse_data_line(line, data_path, lineno))
        index_path = root / f"index.{suffix}"
        for lineno, line in _content_lines(index_path):
            index_order.extend(_parse_index_line(line, index_path, lineno))
    store = WordNetStore.from_records(records, source=root, index_order=index_order)
    logger.info("loaded %d synsets from %s", len(store), root)
    return store


def load_fixture(path) -> WordNetStore:
    """Load the JSON-lines synset fixture format."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"fixture not found: {path}")
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rec = {
                    "id": str(obj["id"]),
                    "pos": PosTag.from_wordnet(obj["pos"]),
                    "lemmas": list(obj["lemmas"]),
                    "hypernyms": [str(h) for h in obj.get("hypernyms", [])],
                    "antonyms": [str(a) for a in obj.get("antonyms", [])],
                    "_line": lineno,
                }
            except (ValueError, KeyError, TypeError) as exc:
                raise ParseError(f"bad fixture record ({exc!r})", path, lineno) from None
            records.append(rec)
    return WordNetStore.from_records(records, source=path)


def dump_fixture(store: WordNetStore, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sid in sorted(store.synsets):
            s = store.synsets[sid]
            obj = {
                "id": s.id,
                "pos": s.pos.value,
                "lemmas": list(s.lemmas),
                "hypernyms": list(s.hypernyms),
                "antonyms": list(s.antonyms),
            }
            fh.write(json.dumps(obj) + "\n")


def load_lexicon(path) -> WordNetStore:
    """Load either format: a directory is a Princeton database, a file a fixture."""
    return load_wordnet(path) if os.path.isdir(path) else load_fixture(path)


# -- similarity queries --------------------------------------------------


def wn_simwords(store: WordNetStore, word: str, pos: PosTag, t: int = 1) -> frozenset:
    """Words within ``t`` hypernym/hyponym hops of ``word``, plus synonyms and antonyms.

    Only single-token lemmas indexed under ``pos`` are returned, and never
    ``word`` itself. Unknown words yield an empty set.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if pos is PosTag.OTHER:
        raise ValueError("wn_simwords needs a WordNet part of speech")
    found = set()
    for sid in store.synsets_for(word, pos):
        syn = store.synsets[sid]
        found.update(syn.lemmas)
        for other in syn.antonyms:
            found.update(store.synsets[other].lemmas)
        seen = {sid}
        frontier = deque([(sid, 0)])
        while frontier:
            node, dist = frontier.popleft()
            if dist == t:
                continue
            s = store.synsets[node]
            for nxt in s.hypernyms + s.hyponyms:
                if nxt not in seen:
                    seen.add(nxt)
                    found.update(store.synsets[nxt].lemmas)
                    frontier.append((nxt, dist + 1))
    found.discard(word)
    return frozenset(
        w for w in found if _SINGLE_TOKEN.fullmatch(w) and store.has_lemma(w, pos)
    )


def wu_palmer_synset(store: WordNetStore, a: str, b: str) -> float:
    """``2 * depth(lcs) / (depth(a) + depth(b))`` over primary hypernym chains.

    Synsets without a real common ancestor meet at a virtual root: the
    per-POS root (depth 1, everything below shifted by one) when they share
    a part of speech, the global root (shift of two) otherwise.
    """
    sa, sb = store.synset(a), store.synset(b)
    if a == b:
        return 1.0
    da, db = store.depth[a], store.depth[b]
    chain_b = set(store.primary_chain(b))
    for node in store.primary_chain(a):
        if node in chain_b:
            return 2.0 * store.depth[node] / (da + db)
    if sa.pos is sb.pos:
        return 2.0 / (da + db + 2)
    return 2.0 / (da + db + 4)


def wu_palmer_words(store: WordNetStore, w1: str, w2: str) -> Optional[float]:
    """Best synset-pair score for two words, same-POS pairs preferred.

    Returns ``None`` when either word has no synset.
    """
    if w1 == w2:
        return 1.0
    key = (w1, w2) if w1 <= w2 else (w2, w1)
    cache = store._wup_cache
    if key in cache:
        return cache[key]
    s1, s2 = store.synsets_for(w1), store.synsets_for(w2)
    if not s1 or not s2:
        score = None
    else:
        same = [
            wu_palmer_synset(store, x, y)
            for x in s1
            for y in s2
            if store.synsets[x].pos is store.synsets[y].pos
        ]
        score = max(same) if same else max(wu_palmer_synset(store, x, y) for x in s1 for y in s2)
    cache[key] = score
    return score


def wu_palmer_sentence(store: WordNetStore, a: Document, b: Document) -> float:
    """Position-aligned mean of word-level Wu-Palmer scores.

    Equal tokens count 1, words unknown to the lexicon count 0.5.
    """
    if len(a.tokens) != len(b.tokens):
        raise LengthMismatch(f"documents of length {len(a.tokens)} and {len(b.tokens)}")
    if not a.tokens:
        return 1.0
    total = 0.0
    for x, y in zip(a.tokens, b.tokens):
        if x == y:
            total += 1.0
            continue
        score = wu_palmer_words(store, x, y)
        total += UNKNOWN_WORD_SCORE if score is None else score
    return total / len(a.tokens)

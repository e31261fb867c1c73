#!/usr/bin/env python3
"""Regenerate the resources bundled in src/textcf/data.

* mini_wordnet/      WordNet 3.x database format (index.* and data.*)
* mini_wordnet.jsonl the same lexicon in the JSON-lines fixture format
* polarity_vectors.txt  word vectors covering the synthetic corpus
* polarity.csv       2,000 synthetic reviews

Output is deterministic; rerunning must not change any file.
"""
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from textcf import synthetic  # noqa: E402
from textcf.wordnet import dump_fixture, load_wordnet  # noqa: E402

DATA = ROOT / "src" / "textcf" / "data"

# key: (pos, lemmas, hypernym keys, antonym keys, lexfile)
SYNSETS = {
    # nouns
    "entity": ("n", ["entity"], [], [], 3),
    "physical_entity": ("n", ["physical_entity"], ["entity"], [], 3),
    "abstraction": ("n", ["abstraction", "abstract_entity"], ["entity"], [], 3),
    "object": ("n", ["object", "physical_object"], ["physical_entity"], [], 3),
    "communication": ("n", ["communication"], ["abstraction"], [], 10),
    "show": ("n", ["show"], ["communication"], [], 10),
    "movie": ("n", ["movie", "film", "picture", "flick"], ["show"], [], 10),
    "story": ("n", ["story", "narrative"], ["communication"], [], 10),
    "plot": ("n", ["plot", "storyline"], ["story"], [], 10),
    "performance": ("n", ["performance"], ["show"], [], 4),
    "acting": ("n", ["acting", "playing"], ["performance"], [], 4),
    "music": ("n", ["music"], ["communication"], [], 10),
    "ending": ("n", ["ending", "conclusion", "finish"], ["abstraction"], [], 4),
    "scene": ("n", ["scene"], ["show"], [], 10),
    "dialogue": ("n", ["dialogue", "dialog"], ["communication"], [], 10),
    "writing": ("n", ["writing", "written_communication"], ["communication"], [], 10),
    "script": ("n", ["script", "screenplay"], ["writing"], [], 10),
    "book": ("n", ["book", "volume"], ["object", "writing"], [], 6),
    # verbs
    "perceive": ("v", ["perceive", "comprehend"], [], [], 39),
    "see": ("v", ["see", "watch", "view"], ["perceive"], [], 39),
    "seem": ("v", ["seem", "appear"], [], [], 42),
    "arrange": ("v", ["arrange", "set_up"], [], [], 41),
    "book_v": ("v", ["book", "reserve"], ["arrange"], [], 41),
    "love": ("v", ["love"], [], ["hate"], 37),
    "hate": ("v", ["hate", "detest"], [], ["love"], 37),
    # adjectives
    "good": ("a", ["good"], [], ["bad"], 0),
    "bad": ("a", ["bad", "poor"], [], ["good"], 0),
    "best": ("a", ["best"], [], ["worst"], 0),
    "worst": ("a", ["worst"], [], ["best"], 0),
    "great": ("a", ["great", "excellent"], [], ["terrible"], 0),
    "terrible": ("a", ["terrible", "awful"], [], ["great"], 0),
    "wonderful": ("a", ["wonderful", "superb"], [], ["dreadful"], 0),
    "dreadful": ("a", ["dreadful", "horrible"], [], ["wonderful"], 0),
    "splendid": ("s", ["splendid", "glorious"], [], [], 0),
    "long": ("a", ["long"], [], ["short"], 0),
    "short": ("a", ["short"], [], ["long"], 0),
    "new": ("a", ["new"], [], ["old"], 0),
    "old": ("a", ["old"], [], ["new"], 0),
    # adverbs
    "honestly": ("r", ["honestly", "frankly"], [], [], 2),
    "really": ("r", ["really", "truly"], [], [], 2),
    "certainly": ("r", ["certainly", "surely"], [], [], 2),
    "overall": ("r", ["overall"], [], [], 2),
}
# similar-to pointer for the satellite (parsed and ignored)
SIMILAR = {"splendid": "great"}

FILES = {"n": "noun", "v": "verb", "a": "adj", "s": "adj", "r": "adv"}
HEADER = [
    "  1 Miniature database in the WordNet 3.x file format.",
    "  2 Hand-built for tests; offsets are byte offsets into this file.",
]


def _render(key, offsets):
    pos, lemmas, hyper, anto, lexfile = SYNSETS[key]
    ptr_pos = lambda k: "a" if SYNSETS[k][0] == "s" else SYNSETS[k][0]  # noqa: E731
    words = " ".join(f"{w}{'(a)' if pos in 'as' and w == 'best' else ''} 0" for w in lemmas)
    ptrs = []
    for h in hyper:
        ptrs.append(f"@ {offsets[h]:08d} {ptr_pos(h)} 0000")
    for other, (opos, _, ohyper, _, _) in SYNSETS.items():
        if key in ohyper:
            ptrs.append(f"~ {offsets[other]:08d} {ptr_pos(other)} 0000")
    for a in anto:
        ptrs.append(f"! {offsets[a]:08d} {ptr_pos(a)} 0101")
    if key in SIMILAR:
        ptrs.append(f"& {offsets[SIMILAR[key]]:08d} a 0000")
    tail = " 01 + 02 00" if pos == "v" else ""
    gloss = f"synset for {lemmas[0].replace('_', ' ')}"
    return (
        f"{offsets[key]:08d} {lexfile:02d} {pos} {len(lemmas):02x} {words} "
        f"{len(ptrs):03d}{' ' if ptrs else ''}{' '.join(ptrs)}{tail} | {gloss}  \n"
    )


def write_wordnet(out: Path):
    out.mkdir(parents=True, exist_ok=True)
    header = "".join(h + "\n" for h in HEADER)
    groups = {}
    for key, entry in SYNSETS.items():
        groups.setdefault(FILES[entry[0]], []).append(key)
    # line lengths do not depend on offset values (fixed width), so two passes suffice
    offsets = {k: 0 for k in SYNSETS}
    for _ in range(2):
        for fname, keys in groups.items():
            pos = len(header.encode())
            for k in keys:
                offsets[k] = pos
                pos += len(_render(k, offsets).encode())
    for fname in ("noun", "verb", "adj", "adv"):
        keys = groups.get(fname, [])
        with open(out / f"data.{fname}", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header)
            for k in keys:
                fh.write(_render(k, offsets))
        index = {}
        for k in keys:
            for w in SYNSETS[k][1]:
                index.setdefault(w.lower(), []).append(k)
        with open(out / f"index.{fname}", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header)
            code = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}[fname]
            for lemma in sorted(index):
                keys_l = index[lemma]
                symbols = set()
                for k in keys_l:
                    if SYNSETS[k][2]:
                        symbols.add("@")
                    if SYNSETS[k][3]:
                        symbols.add("!")
                    if any(k in s[2] for s in SYNSETS.values()):
                        symbols.add("~")
                syms = sorted(symbols)
                offs = " ".join(f"{offsets[k]:08d}" for k in keys_l)
                fh.write(
                    f"{lemma} {code} {len(keys_l)} {len(syms)} {' '.join(syms)}{' ' if syms else ''}"
                    f"{len(keys_l)} 0 {offs}  \n"
                )


def write_vectors(path: Path, dim=24, seed=7):
    rng = np.random.default_rng(seed)
    axes = {}

    def axis(name):
        if name not in axes:
            axes[name] = rng.normal(size=dim) / np.sqrt(dim)
            axes[name] /= np.linalg.norm(axes[name])
        return axes[name]

    def noisy(base, scale):
        v = base + scale * rng.normal(size=dim) / np.sqrt(dim)
        return v / np.linalg.norm(v)

    words = {}
    polar = axis("polar_adj")
    sentiment = axis("sentiment")
    for w in synthetic.POSITIVE:
        words[w] = noisy(polar + 0.3 * sentiment, 0.12)
    for w in synthetic.NEGATIVE:
        words[w] = noisy(polar - 0.3 * sentiment, 0.12)
    words["ill"] = noisy(polar - 0.3 * sentiment, 0.4)
    for w in ("splendid", "glorious"):
        words[w] = noisy(polar + 0.3 * sentiment, 0.3)
    for w in synthetic.NEUTRAL_ADJ:
        words[w] = noisy(0.5 * polar + axis("size_age"), 0.6)
    for group, members in (
        ("noun", synthetic.NOUNS + ("show", "performance", "book", "picture", "films")),
        ("verb", synthetic.VERBS + ("seem", "seemed", "perceive", "love", "hate")),
        ("adverb", synthetic.LEAN_POSITIVE + synthetic.LEAN_NEGATIVE + ("surely",)),
    ):
        for w in members:
            words[w] = noisy(axis(group), 0.8)
    for w in ("the", "a", "and", "was", "it", "we", "this", "is", "one", "of", ",", ".", "'s", "polanski"):
        words[w] = noisy(axis("function"), 2.5)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(words)} {dim}\n")
        for w, v in words.items():
            fh.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")


def main():
    write_wordnet(DATA / "mini_wordnet")
    dump_fixture(load_wordnet(DATA / "mini_wordnet"), DATA / "mini_wordnet.jsonl")
    write_vectors(DATA / "polarity_vectors.txt")
    synthetic.write_csv(synthetic.make_polarity_corpus(2000, seed=0), DATA / "polarity.csv")


if __name__ == "__main__":
    main()

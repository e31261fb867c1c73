"""Synthetic polarity corpus plus the bundled lexical resources that cover it.

Each review carries exactly one polarity adjective, and that adjective alone
decides the label. Filler slots (nouns, verbs, neutral adjectives) are drawn
independently of the label. Three adverb slots are mildly label-correlated:
every review holds at least one adverb from each of two groups and the third
adverb leans towards the review's class, the way real reviews have weakly
informative context words.
"""
from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path

import numpy as np

POSITIVE = ("good", "best", "great", "excellent", "wonderful", "superb")
NEGATIVE = ("bad", "poor", "worst", "terrible", "awful", "dreadful", "horrible")
NEUTRAL_ADJ = ("long", "short", "new", "old")
NOUNS = ("movie", "film", "plot", "story", "acting", "music", "ending", "script", "dialogue", "scene")
VERBS = ("watch", "see", "view")
LEAN_POSITIVE = ("honestly", "frankly", "certainly")
LEAN_NEGATIVE = ("really", "truly", "overall")
LABELS = ("negative", "positive")


def _review(rng, label: int) -> str:
    adj = rng.choice(POSITIVE if label == 1 else NEGATIVE)
    leans = [rng.choice(LEAN_POSITIVE), rng.choice(LEAN_NEGATIVE)]
    p_pos = 0.8 if label == 1 else 0.2
    leans.append(rng.choice(LEAN_POSITIVE if rng.random() < p_pos else LEAN_NEGATIVE))
    rng.shuffle(leans)
    noun1, noun2 = rng.choice(NOUNS, size=2, replace=False)
    words = [
        leans[0], ",", "the", noun1, "was", adj, "and", "the", noun2, "seemed",
        rng.choice(NEUTRAL_ADJ), ".", "we", rng.choice(VERBS), "it", leans[1], leans[2], ".",
    ]
    text = " ".join(str(w) for w in words)
    return text.replace(" ,", ",").replace(" .", ".")


def make_polarity_corpus(n_docs: int = 2000, seed: int = 0) -> list:
    """``(text, label_name)`` rows, half of each class, in shuffled order."""
    rng = np.random.default_rng(seed)
    labels = np.array([i % 2 for i in range(n_docs)])
    rng.shuffle(labels)
    return [(_review(rng, int(y)), LABELS[int(y)]) for y in labels]


def write_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["text", "label"])
        w.writerows(rows)


def data_path(name: str) -> Path:
    """Path of a resource bundled in ``textcf/data``."""
    return Path(str(resources.files("textcf").joinpath("data").joinpath(name)))

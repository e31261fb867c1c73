import csv
from pathlib import Path

import pytest

from textcf.blackbox import FunctionBlackBox, LabeledCorpus, ScoredFunctionBlackBox, split
from textcf.embedspace import load_vectors
from textcf.synthetic import LABELS, data_path
from textcf.textcore import tokenize
from textcf.wordnet import load_fixture, load_wordnet

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("acceptance")
    if mark is None or call.when != "call":
        return
    number, title = mark.args
    passed = call.excinfo is None
    prev = _acceptance.get(number, (title, True))
    _acceptance[number] = (title, prev[1] and passed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, passed = _acceptance[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}")


@pytest.fixture(scope="session")
def tiny_wn():
    return load_fixture(FIXTURES / "tiny_wordnet.jsonl")


@pytest.fixture(scope="session")
def tiny_vectors():
    return load_vectors(FIXTURES / "tiny_vectors.txt")


@pytest.fixture(scope="session")
def mini_wn():
    return load_wordnet(data_path("mini_wordnet"))


@pytest.fixture(scope="session")
def polarity_vectors():
    return load_vectors(data_path("polarity_vectors.txt"))


@pytest.fixture(scope="session")
def polarity_corpus():
    with open(data_path("polarity.csv"), encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    docs = [tokenize(r["text"]) for r in rows]
    return LabeledCorpus(docs, [LABELS.index(r["label"]) for r in rows], LABELS)


@pytest.fixture(scope="session")
def polarity_split(polarity_corpus):
    return split(polarity_corpus, 0.7, seed=42)


def keyword_classifier(positive=("best", "good", "great"), scored=False):
    """Label 1 iff the text holds one of ``positive``; 0 otherwise."""
    positive = set(positive)

    def score(doc):
        p = 0.9 if positive & set(doc.tokens) else 0.1
        return [1.0 - p, p]

    if scored:
        return ScoredFunctionBlackBox(score)
    return FunctionBlackBox(lambda doc: int(score(doc)[1] > 0.5))

"""Benchmark metrics and reports for counterfactual methods.

Four axes are measured per (method, target): whether a counterfactual was
found (label flip), how far it is from the target (token and character
Levenshtein, mean-word-vector cosine distance), how fluent it is (n-gram
perplexity, normalised by the largest value in the run) and how long the
search took. Runtime values live under a separate ``timing`` key in every
output so the rest can be compared byte-for-byte between runs.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .embedspace import VectorStore, sentence_vector
from .exceptions import EmptyCorpus, EmptyDocument
from .textcore import Document

__all__ = [
    "levenshtein",
    "char_levenshtein",
    "embedding_distance",
    "NgramLM",
    "train_ngram",
    "perplexity",
    "MetricRecord",
    "EvaluationReport",
    "run_benchmark",
    "aggregate",
    "write_records",
    "read_records",
    "write_report",
    "write_table_csv",
    "BOS",
    "EOS",
]

BOS = "<s>"
EOS = "</s>"
METRICS = (
    "levenshtein_tokens",
    "levenshtein_chars",
    "embedding_distance",
    "perplexity",
    "perplexity_normalized",
)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Edit distance with unit insert, delete and substitute costs."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def char_levenshtein(a: str, b: str) -> int:
    return levenshtein(a, b)


def embedding_distance(store: VectorStore, a: Document, b: Document) -> float:
    """``1 - cos`` of the two sentence vectors; 1.0 if either has no known word."""
    va, oov_a = sentence_vector(store, a, return_oov=True)
    vb, oov_b = sentence_vector(store, b, return_oov=True)
    if oov_a or oov_b:
        return 1.0
    return float(1.0 - np.clip(va @ vb, -1.0, 1.0))


@dataclass
class NgramLM:
    """Add-one smoothed n-gram model over padded sentences.

    ``P(w | ctx) = (c(ctx, w) + 1) / (c(ctx) + V)`` where ``V`` counts the
    training vocabulary plus the two boundary symbols.
    """

    order: int
    vocab: frozenset
    counts: dict = field(default_factory=dict)
    context_totals: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.order not in (2, 3):
            raise ValueError("order must be 2 or 3")
        self.vocab = frozenset(self.vocab) | {BOS, EOS}

    @property
    def V(self) -> int:
        return len(self.vocab)

    def prob(self, word: str, context: Sequence[str]) -> float:
        ctx = tuple(context)[-(self.order - 1):]
        c = self.counts.get(ctx, {}).get(word, 0)
        return (c + 1.0) / (self.context_totals.get(ctx, 0) + self.V)

    def padded(self, tokens: Sequence[str]) -> list:
        return [BOS] * (self.order - 1) + list(tokens) + [EOS]


def train_ngram(corpus: Iterable[Sequence[str]], order: int = 2) -> NgramLM:
    sentences = [list(s.tokens) if isinstance(s, Document) else list(s) for s in corpus]
    if not sentences:
        raise EmptyCorpus("cannot train a language model on zero sentences")
    vocab = set()
    counts = {}
    totals = {}
    lm = NgramLM(order, frozenset())
    for sent in sentences:
        vocab.update(sent)
        seq = lm.padded(sent)
        for i in range(order - 1, len(seq)):
            ctx = tuple(seq[i - order + 1 : i])
            bucket = counts.setdefault(ctx, {})
            bucket[seq[i]] = bucket.get(seq[i], 0) + 1
            totals[ctx] = totals.get(ctx, 0) + 1
    return NgramLM(order, frozenset(vocab), counts, totals)


def perplexity(lm: NgramLM, doc) -> float:
    """``exp`` of the mean negative log-probability over the padded positions."""
    tokens = list(doc.tokens) if isinstance(doc, Document) else list(doc)
    if not tokens:
        raise EmptyDocument("perplexity of an empty document is undefined")
    seq = lm.padded(tokens)
    n = lm.order - 1
    total = 0.0
    for i in range(n, len(seq)):
        total += math.log(lm.prob(seq[i], seq[i - n : i]))
    return math.exp(-total / (len(seq) - n))


@dataclass
class MetricRecord:
    method: str
    target_id: str
    found: bool
    levenshtein_tokens: Optional[int] = None
    levenshtein_chars: Optional[int] = None
    embedding_distance: Optional[float] = None
    perplexity: Optional[float] = None
    runtime_ms: int = 0
    original: str = ""
    counterfactual: Optional[str] = None
    modified_positions: Optional[list] = None
    timed_out: bool = False
    error: Optional[str] = None

    def to_json(self) -> str:
        body = asdict(self)
        timing = {"runtime_ms": body.pop("runtime_ms")}
        body["timing"] = timing
        return json.dumps(body, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "MetricRecord":
        body = json.loads(line)
        body["runtime_ms"] = body.pop("timing")["runtime_ms"]
        return cls(**body)


@dataclass
class EvaluationReport:
    methods: dict
    normalization: dict
    config: dict
    records: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {"methods": self.methods, "normalization": self.normalization, "config": self.config}

    def label_flip_rate(self, method: str) -> float:
        return self.methods[method]["label_flip_rate"]


def _stats(values) -> Optional[dict]:
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    arr = np.asarray(vals, dtype=np.float64)
    return {
        "mean": float(arr.mean()),
        "median": float(np.median(arr)),
        "std": float(arr.std()),
        "count": len(vals),
    }


def aggregate(records: Sequence[MetricRecord], config: Optional[dict] = None) -> EvaluationReport:
    """Build the report from per-record results alone."""
    ppl = [r.perplexity for r in records if r.found and r.perplexity is not None]
    ppl_max = max(ppl) if ppl else None
    methods = {}
    for name in dict.fromkeys(r.method for r in records):
        rows = [r for r in records if r.method == name]
        found = [r for r in rows if r.found]
        metrics = {
            "levenshtein_tokens": _stats(r.levenshtein_tokens for r in found),
            "levenshtein_chars": _stats(r.levenshtein_chars for r in found),
            "embedding_distance": _stats(r.embedding_distance for r in found),
            "perplexity": _stats(r.perplexity for r in found),
            "perplexity_normalized": _stats(
                None if r.perplexity is None or not ppl_max else r.perplexity / ppl_max for r in found
            ),
        }
        methods[name] = {
            "targets": len(rows),
            "found": len(found),
            "label_flip_rate": len(found) / len(rows),
            "errors": sum(1 for r in rows if r.error),
            "timed_out": sum(1 for r in rows if r.timed_out),
            "metrics": metrics,
            "timing": {"runtime_ms": _stats(r.runtime_ms for r in rows)},
        }
    return EvaluationReport(methods, {"perplexity_max": ppl_max}, dict(config or {}), list(records))


def _measure(name, target_id, doc, method, stores) -> MetricRecord:
    vectors = stores.get("vectors")
    lm = stores.get("lm")
    start = time.perf_counter()
    info = {}
    try:
        cf = method.explain(doc, info=info) if hasattr(method, "explain") else method(doc)
        error = None
    except Exception as exc:  # recorded per target, the run goes on
        cf, error = None, f"{type(exc).__name__}: {exc}"
    runtime_ms = int(round((time.perf_counter() - start) * 1000))
    rec = MetricRecord(
        method=name,
        target_id=str(target_id),
        found=cf is not None,
        runtime_ms=runtime_ms,
        original=doc.raw,
        timed_out=bool(info.get("timed_out", False)),
        error=error,
    )
    if cf is not None:
        rec.levenshtein_tokens = levenshtein(doc.tokens, cf.document.tokens)
        rec.levenshtein_chars = char_levenshtein(doc.raw, cf.document.raw)
        if vectors is not None:
            rec.embedding_distance = embedding_distance(vectors, doc, cf.document)
        if lm is not None:
            rec.perplexity = perplexity(lm, cf.document)
        rec.counterfactual = cf.document.raw
        rec.modified_positions = sorted(cf.modified_positions)
    return rec


def run_benchmark(
    methods: Mapping[str, object],
    targets,
    f=None,
    stores: Optional[Mapping] = None,
    config=None,
    n_jobs: int = 1,
) -> EvaluationReport:
    """Run every method on every target and aggregate the results.

    ``methods`` maps a name to an explainer (anything with ``explain``) or a
    plain ``doc -> Counterfactual | None`` callable already bound to its
    black box. ``targets`` is a list of documents or ``(id, document)`` pairs.
    ``f`` is kept for the report echo only; the explainers carry their own.
    """
    targets = list(targets)
    if not targets:
        raise ValueError("run_benchmark needs at least one target")
    pairs = [t if isinstance(t, tuple) else (str(i), t) for i, t in enumerate(targets)]
    stores = dict(stores or {})
    jobs = [
        (name, tid, doc, m) for name, m in methods.items() for tid, doc in pairs
    ]
    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            records = list(pool.map(lambda j: _measure(*j, stores), jobs))
    else:
        records = [_measure(*j, stores) for j in jobs]
    order = {name: k for k, name in enumerate(methods)}
    records.sort(key=lambda r: (order[r.method], _tid_key(r.target_id)))
    echo = config.to_dict() if hasattr(config, "to_dict") else dict(config or {})
    if f is not None:
        echo.setdefault("blackbox", type(f).__name__)
    return aggregate(records, echo)


def _tid_key(tid: str):
    return (0, int(tid), "") if tid.isdigit() else (1, 0, tid)


def write_records(records: Iterable[MetricRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_records(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [MetricRecord.from_json(line) for line in fh if line.strip()]


def write_report(report: EvaluationReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_table_csv(report: EvaluationReport, path) -> None:
    """One row per method: flip rate, distance and fluency means, runtime."""
    cols = [
        "method",
        "targets",
        "found",
        "label_flip_rate",
        "levenshtein_tokens_mean",
        "levenshtein_tokens_median",
        "levenshtein_chars_mean",
        "embedding_distance_mean",
        "perplexity_normalized_mean",
        "runtime_ms_mean",
        "runtime_ms_std",
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for name, agg in report.methods.items():
            m = agg["metrics"]

            def pick(metric, stat, src=m):
                s = src.get(metric)
                return "" if s is None else f"{s[stat]:.6g}"

            w.writerow(
                [
                    name,
                    agg["targets"],
                    agg["found"],
                    f"{agg['label_flip_rate']:.4f}",
                    pick("levenshtein_tokens", "mean"),
                    pick("levenshtein_tokens", "median"),
                    pick("levenshtein_chars", "mean"),
                    pick("embedding_distance", "mean"),
                    pick("perplexity_normalized", "mean"),
                    pick("runtime_ms", "mean", agg["timing"]),
                    pick("runtime_ms", "std", agg["timing"]),
                ]
            )

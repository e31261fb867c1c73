"""Command-line entry point: ``textcf train|explain|evaluate|inspect``.

Settings come from three layers, later ones winning: built-in defaults, a
``key=value`` config file (``--config``) and command-line flags. Relative
resource paths are resolved against ``$TEXTCF_RESOURCES`` when it is set.
When no WordNet or vector file is given, the bundled miniature resources are
used.

Exit codes: 0 success (a search that finds nothing is still a success),
1 runtime or resource failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import evalharness
from .blackbox import (
    LabeledCorpus,
    fit_vectorizer,
    load_model,
    save_model,
    split,
    train_logreg,
    train_naive_bayes,
)
from .embedspace import load_vectors
from .exceptions import MissingColumn, MissingFile, ParseError, TextCFError
from .explain import SEDC, ExplainConfig, GrowingLanguage, GrowingNet, RandomReplacement
from .synthetic import data_path
from .textcore import pos_tag, tokenize
from .wordnet import load_lexicon

log = logging.getLogger("textcf")

RESOURCE_ENV = "TEXTCF_RESOURCES"
METHODS = ("growing_net", "growing_language", "sedc", "random")
CLASSIFIERS = ("naive_bayes", "logreg")
VECTORIZERS = ("count", "tfidf")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    dataset: Optional[str] = None
    wordnet: Optional[str] = None
    vectors: Optional[str] = None
    model: Optional[str] = None
    methods: Optional[str] = None
    classifier: str = "naive_bayes"
    vectorizer: str = "count"
    out: str = "."
    seed: int = 42
    n: int = 2000
    t: int = 1
    theta: float = 0.9
    tau: float = 0.02
    theta_min: float = 0.4
    max_runtime: Optional[float] = None
    n_jobs: int = 1
    n_targets: int = 100
    lm_order: int = 2

    def method_list(self, default=METHODS) -> list:
        if self.methods is None:
            return list(default)
        names = [m.strip() for m in self.methods.split(",") if m.strip()]
        bad = [m for m in names if m not in METHODS]
        if bad or not names:
            raise UsageError(f"unknown method(s) {bad}; choose from {', '.join(METHODS)}")
        return names

    def explain_config(self) -> ExplainConfig:
        try:
            return ExplainConfig(
                n=self.n, t=self.t, theta=self.theta, tau=self.tau, theta_min=self.theta_min,
                seed=self.seed, max_runtime=self.max_runtime, n_jobs=self.n_jobs,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def validate(self) -> "RunConfig":
        if self.classifier not in CLASSIFIERS:
            raise UsageError(f"unknown classifier {self.classifier!r}; choose from {', '.join(CLASSIFIERS)}")
        if self.vectorizer not in VECTORIZERS:
            raise UsageError(f"unknown vectorizer {self.vectorizer!r}; choose from {', '.join(VECTORIZERS)}")
        if self.n_targets < 1:
            raise UsageError("n_targets must be >= 1")
        if self.lm_order not in (2, 3):
            raise UsageError("lm_order must be 2 or 3")
        self.method_list()
        self.explain_config()
        return self

    def resolve(self, value: Optional[str], default: Optional[str] = None) -> Optional[Path]:
        """Absolute path for a resource, or the bundled default."""
        if value is None:
            return None if default is None else data_path(default)
        p = Path(value).expanduser()
        root = os.environ.get(RESOURCE_ENV)
        if not p.is_absolute() and root and not p.exists():
            p = Path(root) / p
        if not p.exists():
            raise MissingFile(f"no such file or directory: {p}")
        return p


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if raw.lower() in ("", "none", "null") and "Optional" in str(kind):
        return None
    try:
        if "int" in str(kind):
            return int(raw)
        if "float" in str(kind):
            return float(raw)
    except ValueError:
        raise UsageError(f"bad value for {key}: {raw!r}") from None
    return raw


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise MissingFile(f"config file not found: {path}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for name in _FIELD_TYPES:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return RunConfig(**values).validate()


# -- data ----------------------------------------------------------------------


def load_dataset(path, lexicon=None) -> LabeledCorpus:
    """Read a ``text,label`` CSV; label names map to ids in sorted order."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"dataset not found: {path}")
    texts, names = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty dataset file", path, 1) from None
        except csv.Error as exc:
            raise ParseError(str(exc), path, reader.line_num) from None
        header = [h.strip().lower() for h in header]
        for col in ("text", "label"):
            if col not in header:
                raise MissingColumn(f"{path}: no {col!r} column in header {header}")
        ti, li = header.index("text"), header.index("label")
        try:
            for row in reader:
                if not row:
                    continue
                if len(row) != len(header):
                    raise ParseError(
                        f"expected {len(header)} fields, got {len(row)}", path, reader.line_num
                    )
                if not row[li].strip():
                    raise ParseError("empty label", path, reader.line_num)
                texts.append(row[ti])
                names.append(row[li].strip())
        except csv.Error as exc:
            raise ParseError(str(exc), path, reader.line_num) from None
    classes = tuple(sorted(set(names)))
    ids = {c: i for i, c in enumerate(classes)}
    docs = [tokenize(t) for t in texts]
    if lexicon is not None:
        docs = [pos_tag(d, lexicon) for d in docs]
    corpus = LabeledCorpus(docs, [ids[n] for n in names], classes)
    log.info("loaded %d rows from %s; class counts %s", len(corpus), path, corpus.class_counts())
    return corpus


def _train(config: RunConfig, train):
    vec = fit_vectorizer(train, mode=config.vectorizer)
    if config.classifier == "logreg":
        return train_logreg(train, vec)
    return train_naive_bayes(train, vec)


def _need(config: RunConfig, name: str) -> Path:
    value = getattr(config, name)
    if value is None:
        raise UsageError(f"--{name} is required for this command")
    return config.resolve(value)


def _lexicon(config):
    return load_lexicon(config.resolve(config.wordnet, "mini_wordnet"))


def _vectors(config):
    return load_vectors(config.resolve(config.vectors, "polarity_vectors.txt"))


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _explainers(config: RunConfig, bb, lexicon, vectors, names) -> dict:
    ec = config.explain_config()
    common = dict(n=ec.n, seed=ec.seed, max_runtime=ec.max_runtime, n_jobs=ec.n_jobs)
    make = {
        "growing_net": lambda: GrowingNet(bb, lexicon, t=ec.t, **common),
        "growing_language": lambda: GrowingLanguage(
            bb, vectors, lexicon, theta=ec.theta, tau=ec.tau, theta_min=ec.theta_min, **common
        ),
        "sedc": lambda: SEDC(bb, **common),
        "random": lambda: RandomReplacement(bb, sorted(bb.vectorizer_.vocabulary_), seed=ec.seed),
    }
    return {name: make[name]() for name in names}


# -- commands ------------------------------------------------------------------


def cmd_train(config: RunConfig) -> dict:
    corpus = load_dataset(_need(config, "dataset"))
    train, test = split(corpus, 0.7, seed=config.seed)
    bb = _train(config, train)
    accuracy = float(np.mean(bb.predict(test.documents) == np.asarray(test.labels)))
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    model_path = Path(config.model) if config.model else out / "model.json"
    save_model(bb, model_path)
    summary = {
        "classifier": config.classifier,
        "vectorizer": config.vectorizer,
        "seed": config.seed,
        "classes": list(corpus.classes),
        "n_train": len(train),
        "n_test": len(test),
        "test_accuracy": accuracy,
        "model": str(model_path),
    }
    _write_json(summary, out / "train_summary.json")
    return summary


def cmd_explain(config: RunConfig, text: str) -> dict:
    if not text or not text.strip():
        raise UsageError("input text is empty")
    bb = load_model(_need(config, "model"))
    names = config.method_list(default=("growing_net",))
    if len(names) != 1:
        raise UsageError("explain takes exactly one method")
    lexicon = _lexicon(config)
    vectors = _vectors(config) if names[0] == "growing_language" else None
    method = _explainers(config, bb, lexicon, vectors, names)[names[0]]
    doc = pos_tag(tokenize(text), lexicon)
    y0 = int(bb.predict([doc])[0])
    label_name = lambda y: bb.class_names[y] if bb.class_names else y  # noqa: E731
    start = time.perf_counter()
    cf = method.explain(doc)
    runtime_ms = int(round((time.perf_counter() - start) * 1000))
    record = {
        "method": names[0],
        "original": doc.raw,
        "original_label": label_name(y0),
        "counterfactual": None,
        "timing": {"runtime_ms": runtime_ms},
    }
    if cf is not None:
        record["counterfactual"] = {
            "text": cf.text,
            "label": label_name(cf.predicted_label),
            "modified_positions": sorted(cf.modified_positions),
            "levenshtein_tokens": evalharness.levenshtein(doc.tokens, cf.document.tokens),
            "levenshtein_chars": evalharness.char_levenshtein(doc.raw, cf.document.raw),
        }
    return record


def sample_targets(test: LabeledCorpus, k: int, seed: int) -> list:
    k = min(k, len(test))
    idx = np.sort(np.random.default_rng(seed).choice(len(test), size=k, replace=False))
    return [(str(int(i)), test.documents[int(i)]) for i in idx]


def cmd_evaluate(config: RunConfig) -> evalharness.EvaluationReport:
    lexicon = _lexicon(config)
    vectors = _vectors(config)
    corpus = load_dataset(_need(config, "dataset"), lexicon)
    train, test = split(corpus, 0.7, seed=config.seed)
    if len(test) == 0:
        raise TextCFError("test split is empty")
    bb = load_model(config.resolve(config.model)) if config.model else _train(config, train)
    targets = sample_targets(test, config.n_targets, config.seed)
    methods = _explainers(config, bb, lexicon, vectors, config.method_list())
    lm = evalharness.train_ngram(train.documents, order=config.lm_order)
    echo = {
        "explain": config.explain_config().to_dict(),
        "classifier": config.classifier if not config.model else "loaded",
        "vectorizer": config.vectorizer,
        "n_targets": len(targets),
        "lm_order": config.lm_order,
        "perplexity_proxy": f"laplace {config.lm_order}-gram",
        "seed": config.seed,
    }
    report = evalharness.run_benchmark(
        methods, targets, bb, {"vectors": vectors, "lm": lm}, echo, n_jobs=config.n_jobs
    )
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    evalharness.write_records(report.records, out / "records.jsonl")
    evalharness.write_report(report, out / "report.json")
    evalharness.write_table_csv(report, out / "table.csv")
    return report


def cmd_inspect(config: RunConfig) -> dict:
    info = {}
    lex_path = config.resolve(config.wordnet, "mini_wordnet")
    info["wordnet"] = {"path": str(lex_path), **load_lexicon(lex_path).stats()}
    vec_path = config.resolve(config.vectors, "polarity_vectors.txt")
    store = load_vectors(vec_path)
    info["vectors"] = {"path": str(vec_path), "words": len(store.words), "dim": store.dim}
    if config.model:
        bb = load_model(config.resolve(config.model))
        info["model"] = {
            "classifier": type(bb.classifier_).__name__,
            "vocabulary": len(bb.vectorizer_.vocabulary_),
            "classes": bb.class_names,
        }
    if config.dataset:
        corpus = load_dataset(config.resolve(config.dataset))
        info["dataset"] = {"rows": len(corpus), "class_counts": corpus.class_counts()}
    return info


# -- argument parsing ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_common(p):
    # defaults stay None so the config file can fill the gaps
    p.add_argument("--config", help="key=value settings file")
    p.add_argument("--dataset", help="CSV with text,label columns")
    p.add_argument("--wordnet", help="WordNet database directory or JSONL fixture")
    p.add_argument("--vectors", help="word vector text file")
    p.add_argument("--model", help="model JSON path")
    p.add_argument("--methods", "--method", dest="methods", help=f"comma list from {', '.join(METHODS)}")
    p.add_argument("--classifier", help=f"one of {', '.join(CLASSIFIERS)}")
    p.add_argument("--vectorizer", help=f"one of {', '.join(VECTORIZERS)}")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, help="perturbed copies per round")
    p.add_argument("--t", type=int, help="WordNet hop limit")
    p.add_argument("--theta", type=float, help="initial similarity threshold")
    p.add_argument("--tau", type=float, help="threshold step")
    p.add_argument("--theta-min", dest="theta_min", type=float)
    p.add_argument("--max-runtime", dest="max_runtime", type=float, help="seconds per explanation")
    p.add_argument("--n-jobs", dest="n_jobs", type=int)
    p.add_argument("--n-targets", dest="n_targets", type=int)
    p.add_argument("--lm-order", dest="lm_order", type=int)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="textcf", description="Counterfactual explanations for text classifiers.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (
        ("train", "train a black-box classifier"),
        ("explain", "explain one text"),
        ("evaluate", "benchmark methods on test targets"),
        ("inspect", "print resource statistics"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "explain":
            p.add_argument("text")
    return parser


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(message)s",
        )
        config = build_config(args)
        if args.command == "train":
            result = cmd_train(config)
        elif args.command == "explain":
            result = cmd_explain(config, args.text)
        elif args.command == "evaluate":
            report = cmd_evaluate(config)
            result = {k: v["label_flip_rate"] for k, v in report.methods.items()}
        else:
            result = cmd_inspect(config)
    except UsageError as exc:
        print(f"textcf: usage error: {exc}", file=sys.stderr)
        return 2
    except (TextCFError, OSError, ValueError) as exc:
        print(f"textcf: error: {exc}", file=sys.stderr)
        return 1
    json.dump(result, sys.stdout, indent=2, sort_keys=True, ensure_ascii=False)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Counterfactual explanations for black-box text classifiers."""
from .blackbox import (
    LabeledCorpus,
    TextBlackBox,
    TextVectorizer,
    LaplaceNaiveBayes,
    GradientLogisticRegression,
    FunctionBlackBox,
    ScoredFunctionBlackBox,
    load_model,
    save_model,
)
from .embedspace import VectorStore, load_vectors
from .evalharness import run_benchmark
from .explain import SEDC, Counterfactual, ExplainConfig, GrowingLanguage, GrowingNet, RandomReplacement
from .textcore import Document, PosTag, detokenize, pos_tag, tokenize
from .wordnet import WordNetStore, load_fixture, load_lexicon, load_wordnet

__version__ = "0.1.0"

__all__ = [
    "Counterfactual",
    "Document",
    "ExplainConfig",
    "FunctionBlackBox",
    "GradientLogisticRegression",
    "GrowingLanguage",
    "GrowingNet",
    "LabeledCorpus",
    "LaplaceNaiveBayes",
    "PosTag",
    "RandomReplacement",
    "SEDC",
    "ScoredFunctionBlackBox",
    "TextBlackBox",
    "TextVectorizer",
    "VectorStore",
    "WordNetStore",
    "detokenize",
    "load_fixture",
    "load_lexicon",
    "load_model",
    "load_vectors",
    "load_wordnet",
    "pos_tag",
    "run_benchmark",
    "save_model",
    "tokenize",
]

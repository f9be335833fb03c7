"""Corpus engineering and evaluation toolkit for app-review feature extraction.

The package turns per-app feature phrase lists into token-level BIO ground
truth, builds instance-selection and cross-validation plans on top of the
labeled corpus, and scores predictions with recall-weighted F measures.
Everything is reachable from one `frex` executable; the same functionality
is importable from the submodules:

    frex.model       core data types and BIO validation
    frex.conllu      corpus (de)serialization
    frex.transfer    phrase-to-token label transfer
    frex.selection   centroid-distance instance selection
    frex.splitting   stratified and leave-one-category-out folds
    frex.metrics     token/span scoring, recall-weighted F
    frex.humaneval   annotator questionnaire aggregation
    frex.stats       corpus statistics
    frex.embeddings  embedding stores, JSONL IO, mock embedder
"""

__version__ = "0.1.0"

from .conllu import parse_corpus, read_corpus, serialize_corpus, write_corpus
from .metrics import DEFAULT_BETA, compute_beta, f_beta, score_spans, score_tokens
from .model import AnnotatedCorpus, Feature, FeatureSet, Label, Review, Token

__all__ = [
    "__version__",
    "AnnotatedCorpus",
    "DEFAULT_BETA",
    "Feature",
    "FeatureSet",
    "Label",
    "Review",
    "Token",
    "compute_beta",
    "f_beta",
    "parse_corpus",
    "read_corpus",
    "score_spans",
    "score_tokens",
    "serialize_corpus",
    "write_corpus",
]

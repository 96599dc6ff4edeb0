"""Dialogue-quality metric suite: BLEU, perplexity, divergence frontier,
embedding-similarity F1, and emotion accuracy."""

from .accuracy import AccuracyResult, emotion_accuracy
from .bleu import bleu, brevity_penalty
from .corpus import EvalCorpus, MalformedCorpusError, load_corpus
from .embedders import EmbedderPort, HashingEmbedder
from .embedsim import embed_similarity, pair_similarity
from .mauve import divergence_frontier, frontier_area, mauve_score
from .perplexity import TrigramLM, UniformLM, perplexity
from .report import KNOWN_METRICS, MetricReport, run_metrics

__all__ = [
    "AccuracyResult",
    "emotion_accuracy",
    "bleu",
    "brevity_penalty",
    "EvalCorpus",
    "MalformedCorpusError",
    "load_corpus",
    "EmbedderPort",
    "HashingEmbedder",
    "embed_similarity",
    "pair_similarity",
    "divergence_frontier",
    "frontier_area",
    "mauve_score",
    "TrigramLM",
    "UniformLM",
    "perplexity",
    "KNOWN_METRICS",
    "MetricReport",
    "run_metrics",
]

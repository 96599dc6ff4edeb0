"""Assemble metric results into one report with input provenance."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .accuracy import emotion_accuracy
from .bleu import bleu
from .corpus import EvalCorpus
from .embedders import EmbedderPort, HashingEmbedder
from .embedsim import embed_similarity
from .mauve import DEFAULT_LAMBDA_GRID, DEFAULT_SCALING_C, default_cluster_count, mauve_score
from .perplexity import TrigramLM, perplexity

KNOWN_METRICS = ("bleu", "mauve", "ppl", "embedsim", "accuracy")


@dataclass
class MetricReport:
    """Metric values plus the configuration each was computed with."""

    metrics: dict[str, dict] = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def add(self, name: str, value: float, config: dict) -> None:
        self._validate(name, value)
        self.metrics[name] = {"value": value, "config": config}

    @staticmethod
    def _validate(name: str, value: float) -> None:
        if name == "bleu" and not 0.0 <= value <= 1.0:
            raise ValueError(f"bleu out of range: {value}")
        if name == "mauve" and not 0.0 < value <= 1.0 + 1e-9:
            raise ValueError(f"mauve out of range: {value}")
        if name == "ppl" and value < 1.0 - 1e-9:
            raise ValueError(f"perplexity below 1: {value}")
        if name == "accuracy" and not 0.0 <= value <= 1.0:
            raise ValueError(f"accuracy out of range: {value}")
        if name == "embedsim" and not -1.0 <= value <= 1.0 + 1e-9:
            raise ValueError(f"embedsim out of range: {value}")

    def to_json(self) -> str:
        return json.dumps({"metrics": self.metrics, "provenance": self.provenance}, indent=2, sort_keys=True)


def run_metrics(
    corpus: EvalCorpus,
    metrics: list[str],
    embedder: EmbedderPort | None = None,
    seed: int = 0,
) -> MetricReport:
    """Compute the requested metrics over one corpus.

    Perplexity scores the hypotheses under the fallback trigram model fitted
    on the corpus references (the held-in side); mauve compares references
    (human) against hypotheses (model).
    """
    unknown = set(metrics) - set(KNOWN_METRICS)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}; known: {KNOWN_METRICS}")
    embedder = embedder or HashingEmbedder()
    report = MetricReport(
        provenance={
            "corpus_path": corpus.source_path,
            "corpus_sha256": corpus.sha256,
            "pair_records": len(corpus.pairs),
            "emotion_records": len(corpus.emotion_records),
        }
    )
    text_metrics = {"bleu", "mauve", "ppl", "embedsim"}
    if text_metrics & set(metrics) and not corpus.pairs:
        raise ValueError("corpus has no paired records for the text metrics")
    if "accuracy" in metrics and not corpus.emotion_records:
        raise ValueError("corpus has no emotion records for the accuracy metric")

    if "bleu" in metrics:
        report.add("bleu", bleu(corpus.pair_tuples()), {"max_n": 4, "smoothing": "add-one-on-zero"})
    if "mauve" in metrics:
        k = default_cluster_count(len(corpus.pairs))
        value = mauve_score(
            human_texts=[p.reference for p in corpus.pairs],
            model_texts=[p.hypothesis for p in corpus.pairs],
            embedder=embedder,
            k_clusters=k,
            seed=seed,
        )
        report.add(
            "mauve",
            value,
            {
                "k_clusters": k,
                "scaling_c": DEFAULT_SCALING_C,
                "lambda_grid": DEFAULT_LAMBDA_GRID,
                "seed": seed,
                "embedder": type(embedder).__name__,
            },
        )
    if "ppl" in metrics:
        lm = TrigramLM.fit(p.reference for p in corpus.pairs)
        value = perplexity((p.hypothesis for p in corpus.pairs), lm)
        report.add("ppl", value, {"model": "trigram-add-one", "trained_on": "references"})
    if "embedsim" in metrics:
        value = embed_similarity(corpus.pair_tuples(), embedder)
        report.add("embedsim", value, {"embedder": type(embedder).__name__, "matching": "greedy-f1"})
    if "accuracy" in metrics:
        result = emotion_accuracy(corpus.emotion_tuples())
        report.add("accuracy", result.accuracy, {"records": len(corpus.emotion_records)})
        report.metrics["accuracy"]["confusion"] = [list(row) for row in result.confusion]
    return report

"""Greedy token-level embedding-similarity F1 between hypotheses and references.

Precision matches each hypothesis token to its best-cosine reference token;
recall is the symmetric direction; the pair score is their harmonic mean and
the corpus score is the mean over pairs.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .embedders import EmbedderPort
from .textutil import tokenize


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return matrix / norms


def pair_similarity(reference: str, hypothesis: str, embedder: EmbedderPort) -> float:
    ref_tokens = tokenize(reference)
    hyp_tokens = tokenize(hypothesis)
    if not ref_tokens or not hyp_tokens:
        return 0.0
    ref_vectors = _unit_rows(np.asarray(embedder.embed(ref_tokens), dtype=float))
    hyp_vectors = _unit_rows(np.asarray(embedder.embed(hyp_tokens), dtype=float))
    cosines = hyp_vectors @ ref_vectors.T
    precision = float(np.mean(np.max(cosines, axis=1)))
    recall = float(np.mean(np.max(cosines, axis=0)))
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def embed_similarity(pairs: Sequence[tuple[str, str]], embedder: EmbedderPort) -> float:
    """Mean greedy-matching F1 over (reference, hypothesis) pairs."""
    if not pairs:
        raise ValueError("embed_similarity needs a non-empty corpus")
    return float(np.mean([pair_similarity(ref, hyp, embedder) for ref, hyp in pairs]))

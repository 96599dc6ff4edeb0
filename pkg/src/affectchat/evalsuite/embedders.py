"""Embedding ports for the text metrics.

The deterministic hashing embedder keeps the whole suite runnable offline
and identical across machines; a transformer-backed adapter can be swapped
in where model weights are available.
"""

from __future__ import annotations

import hashlib
from collections.abc import Sequence
from typing import Protocol

import numpy as np

from .textutil import tokenize


class EmbedderPort(Protocol):
    def embed(self, texts: Sequence[str]) -> np.ndarray:
        """Fixed-dimension vector per text, stacked row-wise."""
        ...


class HashingEmbedder:
    """Deterministic token-hash embeddings, averaged per text.

    Each token's vector is expanded from its SHA-256 digest, so equal tokens
    map to equal vectors on every platform with no model files involved.
    """

    def __init__(self, dim: int = 64):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        cached = self._token_cache.get(token)
        if cached is not None:
            return cached
        raw = bytearray()
        counter = 0
        while len(raw) < self.dim:
            digest = hashlib.sha256(f"{token}\x00{counter}".encode("utf-8")).digest()
            raw.extend(digest)
            counter += 1
        bytes_arr = np.frombuffer(bytes(raw[: self.dim]), dtype=np.uint8).astype(float)
        vector = bytes_arr / 127.5 - 1.0
        norm = np.linalg.norm(vector)
        vector = vector / norm if norm > 0 else vector
        self._token_cache[token] = vector
        return vector

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        rows = []
        for text in texts:
            tokens = tokenize(text)
            if tokens:
                vector = np.mean([self._token_vector(t) for t in tokens], axis=0)
            else:
                vector = np.zeros(self.dim)
            rows.append(vector)
        return np.asarray(rows)


class TransformerEmbedder:
    """Optional adapter over a sentence-transformer model named in config."""

    def __init__(self, model_name: str):
        from sentence_transformers import SentenceTransformer  # deferred heavy import

        self._model = SentenceTransformer(model_name)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.asarray(self._model.encode(list(texts)))

"""Perplexity under a pluggable scoring language model.

The port contract is per-token log probabilities (all probabilities must be
positive); perplexity is exp of the negative mean over every scored token.
A self-contained add-one-smoothed trigram model makes the metric runnable
without any external scorer.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from typing import Protocol

from .textutil import tokenize

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"


class LanguageModelPort(Protocol):
    def score_tokens(self, tokens: Sequence[str]) -> list[float]:
        """Log probability of each scored token given its left context."""
        ...


def perplexity(texts: Iterable[str], lm: LanguageModelPort) -> float:
    """exp(-(1/N) * sum log p(token | context)) over all scored tokens."""
    log_probs: list[float] = []
    for text in texts:
        log_probs.extend(lm.score_tokens(tokenize(text)))
    if not log_probs:
        raise ValueError("no tokens to score")
    return math.exp(-sum(log_probs) / len(log_probs))


class UniformLM:
    """Assigns every token probability 1/V; perplexity is exactly V."""

    def __init__(self, vocab_size: int):
        if vocab_size < 1:
            raise ValueError("vocabulary must be non-empty")
        self._log_prob = -math.log(vocab_size)

    def score_tokens(self, tokens: Sequence[str]) -> list[float]:
        return [self._log_prob] * len(tokens)


class TrigramLM:
    """Add-one-smoothed trigram model over a training corpus.

    Sequences are padded with two begin markers and closed with an end
    marker, which is scored like any other token. Tokens outside the
    training vocabulary map to the unknown marker. The vocabulary counts
    training tokens plus the end and unknown markers.
    """

    def __init__(self) -> None:
        self._trigram_counts: dict[tuple[str, str, str], int] = {}
        self._bigram_counts: dict[tuple[str, str], int] = {}
        self._vocab: set[str] = set()

    @classmethod
    def fit(cls, texts: Iterable[str]) -> "TrigramLM":
        model = cls()
        for text in texts:
            tokens = tokenize(text)
            model._vocab.update(tokens)
            sequence = [BOS, BOS, *tokens, EOS]
            for i in range(2, len(sequence)):
                context = (sequence[i - 2], sequence[i - 1])
                trigram = (*context, sequence[i])
                model._bigram_counts[context] = model._bigram_counts.get(context, 0) + 1
                model._trigram_counts[trigram] = model._trigram_counts.get(trigram, 0) + 1
        return model

    @property
    def vocab_size(self) -> int:
        return len(self._vocab) + 2  # EOS and UNK

    def _normalize(self, token: str) -> str:
        return token if token in self._vocab or token == EOS else UNK

    def log_prob(self, context: tuple[str, str], token: str) -> float:
        context = (self._normalize(context[0]) if context[0] != BOS else BOS,
                   self._normalize(context[1]) if context[1] != BOS else BOS)
        trigram = (*context, self._normalize(token))
        numerator = self._trigram_counts.get(trigram, 0) + 1
        denominator = self._bigram_counts.get(context, 0) + self.vocab_size
        return math.log(numerator / denominator)

    def score_tokens(self, tokens: Sequence[str]) -> list[float]:
        sequence = [BOS, BOS, *tokens, EOS]
        return [
            self.log_prob((sequence[i - 2], sequence[i - 1]), sequence[i])
            for i in range(2, len(sequence))
        ]

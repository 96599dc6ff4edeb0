"""Corpus-level BLEU: clipped n-gram precision geometric mean times brevity penalty.

Smoothing is add-one on zero n-gram match counts for orders above unigram;
a corpus with no unigram overlap therefore still scores zero. Orders with no
n-grams at all (hypotheses shorter than n everywhere) drop out of the
geometric mean instead of zeroing it.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from .textutil import ngrams, tokenize


def bleu(pairs: Sequence[tuple[str, str]], max_n: int = 4) -> float:
    """Score (reference, hypothesis) string pairs as one corpus."""
    if not pairs:
        raise ValueError("bleu needs a non-empty corpus")
    matched = [0] * (max_n + 1)
    total = [0] * (max_n + 1)
    ref_len = 0
    hyp_len = 0
    for reference, hypothesis in pairs:
        ref_tokens = tokenize(reference)
        hyp_tokens = tokenize(hypothesis)
        ref_len += len(ref_tokens)
        hyp_len += len(hyp_tokens)
        for n in range(1, max_n + 1):
            hyp_counts = ngrams(hyp_tokens, n)
            ref_counts = ngrams(ref_tokens, n)
            total[n] += sum(hyp_counts.values())
            matched[n] += sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())

    log_precision_sum = 0.0
    orders = 0
    for n in range(1, max_n + 1):
        if total[n] == 0:
            continue
        orders += 1
        if matched[n] > 0:
            precision = matched[n] / total[n]
        elif n == 1:
            return 0.0
        else:
            precision = 1.0 / (total[n] + 1.0)
        log_precision_sum += math.log(precision)
    if orders == 0:
        return 0.0

    geometric_mean = math.exp(log_precision_sum / orders)
    return brevity_penalty(hyp_len, ref_len) * geometric_mean


def brevity_penalty(hyp_len: int, ref_len: int) -> float:
    """1 when the hypothesis is at least reference-length, else exp(1 - r/c)."""
    if hyp_len == 0:
        return 0.0
    if hyp_len >= ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / hyp_len)

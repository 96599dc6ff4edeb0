"""Shared tokenization for the text metrics.

Every metric value depends on this choice, so it is pinned: lowercase,
split on whitespace and punctuation (word characters only).
"""

from __future__ import annotations

import re
from collections import Counter

_WORD = re.compile(r"\w+")


def tokenize(text: str) -> list[str]:
    return _WORD.findall(text.lower())


def ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))

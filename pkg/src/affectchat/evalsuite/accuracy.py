"""Emotion classification accuracy with a full confusion matrix."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from ..emotions import EMOTION_INDEX, EMOTIONS


@dataclass(frozen=True)
class AccuracyResult:
    accuracy: float
    confusion: tuple[tuple[int, ...], ...]  # confusion[gold][predicted]

    def off_diagonal_fraction(self) -> float:
        total = sum(sum(row) for row in self.confusion)
        diagonal = sum(self.confusion[i][i] for i in range(len(EMOTIONS)))
        return (total - diagonal) / total


def emotion_accuracy(records: Sequence[tuple[str, str]]) -> AccuracyResult:
    """Fraction of (predicted, gold) records that agree, plus the 7x7 matrix."""
    if not records:
        raise ValueError("emotion_accuracy needs a non-empty record set")
    matrix = [[0] * len(EMOTIONS) for _ in EMOTIONS]
    correct = 0
    for predicted, gold in records:
        if predicted not in EMOTION_INDEX or gold not in EMOTION_INDEX:
            raise ValueError(f"unknown emotion label in record ({predicted!r}, {gold!r})")
        matrix[EMOTION_INDEX[gold]][EMOTION_INDEX[predicted]] += 1
        if predicted == gold:
            correct += 1
    return AccuracyResult(
        accuracy=correct / len(records),
        confusion=tuple(tuple(row) for row in matrix),
    )

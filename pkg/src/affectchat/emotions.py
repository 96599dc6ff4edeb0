"""Canonical emotion labels and probability distributions over them.

The seven labels below are the lingua franca between perception and
dialogue: every module that produces or consumes emotional evidence
indexes vectors by this order. The order is also the tie-break rule
wherever an argmax has to be deterministic.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

EMOTIONS: tuple[str, ...] = (
    "happy",
    "sad",
    "angry",
    "confused",
    "fearful",
    "disgusted",
    "neutral",
)

EMOTION_INDEX: dict[str, int] = {label: i for i, label in enumerate(EMOTIONS)}

# Labels a purely negative text valence cannot tell apart.
NEGATIVE_EMOTIONS: tuple[str, ...] = ("sad", "angry", "fearful", "disgusted")

PROB_TOL = 1e-6


def is_emotion(label: str) -> bool:
    return label in EMOTION_INDEX


@dataclass(frozen=True)
class EmotionDistribution:
    """Probability vector over the seven canonical emotion labels."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.probs) != len(EMOTIONS):
            raise ValueError(f"expected {len(EMOTIONS)} probabilities, got {len(self.probs)}")
        if any(p < 0.0 for p in self.probs):
            raise ValueError(f"negative probability in {self.probs}")
        total = sum(self.probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total}, expected 1")

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "EmotionDistribution":
        """Normalize a nonnegative 7-vector into a distribution."""
        vals = [float(v) for v in values]
        if len(vals) != len(EMOTIONS):
            raise ValueError(f"expected {len(EMOTIONS)} values, got {len(vals)}")
        if any(v < 0.0 for v in vals):
            raise ValueError(f"negative mass in {vals}")
        total = sum(vals)
        if total <= 0.0:
            raise ValueError("cannot normalize zero mass")
        return cls(tuple(v / total for v in vals))

    @classmethod
    def from_mapping(cls, mass: Mapping[str, float]) -> "EmotionDistribution":
        unknown = set(mass) - set(EMOTIONS)
        if unknown:
            raise ValueError(f"unknown emotion labels: {sorted(unknown)}")
        return cls.from_values(mass.get(label, 0.0) for label in EMOTIONS)

    @classmethod
    def one_hot(cls, label: str) -> "EmotionDistribution":
        if not is_emotion(label):
            raise ValueError(f"unknown emotion label: {label!r}")
        return cls(tuple(1.0 if l == label else 0.0 for l in EMOTIONS))

    @classmethod
    def uniform(cls) -> "EmotionDistribution":
        n = len(EMOTIONS)
        return cls(tuple(1.0 / n for _ in range(n)))

    @property
    def label(self) -> str:
        """Argmax label; ties broken by canonical order (first max wins)."""
        best = max(self.probs)
        return EMOTIONS[self.probs.index(best)]

    @property
    def confidence(self) -> float:
        return max(self.probs)

    def prob(self, label: str) -> float:
        return self.probs[EMOTION_INDEX[label]]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(EMOTIONS, self.probs))

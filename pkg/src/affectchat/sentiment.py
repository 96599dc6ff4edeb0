"""Lexicon-based valence scoring of transcribed speech.

Implements the core of the classic rule-based valence method: case-insensitive
lexicon lookup, a three-token negation window (sign flip scaled by 0.74),
booster words that push a valence further toward its sign (damped with
distance), and compound normalization S / sqrt(S^2 + 15). Punctuation and
capitalization amplifiers are deliberately out of scope; downstream fusion
only consumes the compound's sign and rough scale.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from importlib import resources

from .emotions import NEGATIVE_EMOTIONS, EmotionDistribution

NEGATION_SCALAR = -0.74
NEGATION_WINDOW = 3
# Booster increments are damped the further they sit from the scored token.
BOOSTER_DAMPING = (1.0, 0.95, 0.9)
COMPOUND_ALPHA = 15.0

POSITIVE_BAND = 0.05
NEGATIVE_BAND = -0.05


@dataclass(frozen=True)
class SentimentScore:
    """Compound valence plus positive/neutral/negative token proportions."""

    compound: float
    pos: float
    neu: float
    neg: float


@dataclass(frozen=True)
class ValenceLexicon:
    """Token valences plus the negator set and booster increments."""

    valences: dict[str, float]
    negators: frozenset[str]
    boosters: dict[str, float]

    def __post_init__(self) -> None:
        for token, valence in self.valences.items():
            if not token:
                raise ValueError("empty token in lexicon")
            if not math.isfinite(valence):
                raise ValueError(f"non-finite valence for {token!r}")

    @classmethod
    def from_files(cls, lexicon_path: str, modifiers_path: str) -> "ValenceLexicon":
        """Load ``token<TAB>valence`` lines plus the companion modifier file.

        The modifier file carries ``negator<TAB>token`` and
        ``booster<TAB>token<TAB>increment`` lines.
        """
        valences: dict[str, float] = {}
        with open(lexicon_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                token, value = line.split("\t")[:2]
                valences[token.lower()] = float(value)
        negators: set[str] = set()
        boosters: dict[str, float] = {}
        with open(modifiers_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if parts[0] == "negator":
                    negators.add(parts[1].lower())
                elif parts[0] == "booster":
                    boosters[parts[1].lower()] = float(parts[2])
                else:
                    raise ValueError(f"unknown modifier kind: {parts[0]!r}")
        return cls(valences=valences, negators=frozenset(negators), boosters=boosters)

    @classmethod
    def bundled(cls) -> "ValenceLexicon":
        """The compact general-purpose lexicon shipped with the package."""
        data = resources.files("affectchat.data")
        with resources.as_file(data / "valence_lexicon.tsv") as lex:
            with resources.as_file(data / "valence_modifiers.tsv") as mods:
                return cls.from_files(str(lex), str(mods))

    def is_negator(self, token: str) -> bool:
        return token in self.negators or token.endswith("n't")


def tokenize_utterance(text: str) -> list[str]:
    """Whitespace tokens, lowercased, stripped of edge punctuation."""
    tokens = []
    for raw in text.split():
        token = raw.strip(string.punctuation).lower()
        if token:
            tokens.append(token)
    return tokens


def _adjusted_valence(tokens: list[str], i: int, lexicon: ValenceLexicon) -> float:
    valence = lexicon.valences[tokens[i]]
    for distance in range(NEGATION_WINDOW):
        j = i - (distance + 1)
        if j < 0:
            break
        prev = tokens[j]
        # A preceding token that scores on its own neither boosts nor negates.
        if prev in lexicon.valences:
            continue
        increment = lexicon.boosters.get(prev, 0.0)
        if increment != 0.0:
            increment *= BOOSTER_DAMPING[distance]
            valence += increment if valence >= 0.0 else -increment
        if lexicon.is_negator(prev):
            valence *= NEGATION_SCALAR
    return valence


def sentiment_score(text: str, lexicon: ValenceLexicon) -> SentimentScore:
    """Score one utterance; unknown tokens contribute zero valence."""
    tokens = tokenize_utterance(text)
    valences: list[float] = []
    for i, token in enumerate(tokens):
        if token in lexicon.valences:
            valences.append(_adjusted_valence(tokens, i, lexicon))
        else:
            valences.append(0.0)

    total = sum(valences)
    compound = total / math.sqrt(total * total + COMPOUND_ALPHA)

    pos_mass = sum(v + 1.0 for v in valences if v > 0.0)
    neg_mass = sum(-(v - 1.0) for v in valences if v < 0.0)
    neu_mass = float(sum(1 for v in valences if v == 0.0))
    mass = pos_mass + neg_mass + neu_mass
    if mass == 0.0:
        # Empty or whitespace-only input: all mass is neutral by convention.
        return SentimentScore(compound=0.0, pos=0.0, neu=1.0, neg=0.0)
    return SentimentScore(
        compound=compound,
        pos=pos_mass / mass,
        neu=neu_mass / mass,
        neg=neg_mass / mass,
    )


def sentiment_to_distribution(s: SentimentScore) -> EmotionDistribution:
    """Project a compound valence onto the 7-class emotion space.

    Positive valence maps to happy; negative valence cannot distinguish the
    four negative labels from text alone, so its mass is split uniformly and
    discrimination is left to the visual modality. The band between the
    +/-0.05 thresholds is neutral.
    """
    if s.compound >= POSITIVE_BAND:
        return EmotionDistribution.one_hot("happy")
    if s.compound <= NEGATIVE_BAND:
        share = 1.0 / len(NEGATIVE_EMOTIONS)
        return EmotionDistribution.from_mapping({label: share for label in NEGATIVE_EMOTIONS})
    return EmotionDistribution.one_hot("neutral")

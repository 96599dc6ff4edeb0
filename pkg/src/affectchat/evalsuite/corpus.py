"""Evaluation corpus loading: JSON-lines with paired and emotion records.

Paired records: ``{"context": str, "reference": str, "hypothesis": str}``.
Emotion records: ``{"predicted": str, "gold": str}``. A file may mix both.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from ..emotions import EMOTION_INDEX


class MalformedCorpusError(ValueError):
    """The corpus file violates the record schema."""


@dataclass(frozen=True)
class PairRecord:
    context: str
    reference: str
    hypothesis: str


@dataclass(frozen=True)
class EmotionRecord:
    predicted: str
    gold: str


@dataclass(frozen=True)
class EvalCorpus:
    pairs: tuple[PairRecord, ...] = ()
    emotion_records: tuple[EmotionRecord, ...] = ()
    source_path: str = ""
    sha256: str = ""

    def pair_tuples(self) -> list[tuple[str, str]]:
        return [(p.reference, p.hypothesis) for p in self.pairs]

    def emotion_tuples(self) -> list[tuple[str, str]]:
        return [(r.predicted, r.gold) for r in self.emotion_records]


def load_corpus(path: str | Path) -> EvalCorpus:
    path = Path(path)
    raw_bytes = path.read_bytes()
    digest = hashlib.sha256(raw_bytes).hexdigest()
    pairs: list[PairRecord] = []
    emotions: list[EmotionRecord] = []
    for lineno, line in enumerate(raw_bytes.decode("utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedCorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise MalformedCorpusError(f"{path}:{lineno}: record must be an object")
        if "reference" in record or "hypothesis" in record:
            reference = record.get("reference")
            hypothesis = record.get("hypothesis")
            if not reference or not isinstance(reference, str):
                raise MalformedCorpusError(f"{path}:{lineno}: 'reference' must be a non-empty string")
            if not hypothesis or not isinstance(hypothesis, str):
                raise MalformedCorpusError(f"{path}:{lineno}: 'hypothesis' must be a non-empty string")
            pairs.append(PairRecord(record.get("context", ""), reference, hypothesis))
        elif "predicted" in record or "gold" in record:
            predicted = record.get("predicted")
            gold = record.get("gold")
            if predicted not in EMOTION_INDEX or gold not in EMOTION_INDEX:
                raise MalformedCorpusError(
                    f"{path}:{lineno}: emotion record needs canonical 'predicted' and 'gold' labels"
                )
            emotions.append(EmotionRecord(predicted, gold))
        else:
            raise MalformedCorpusError(f"{path}:{lineno}: unrecognized record shape: {sorted(record)}")
    return EvalCorpus(
        pairs=tuple(pairs),
        emotion_records=tuple(emotions),
        source_path=str(path),
        sha256=digest,
    )

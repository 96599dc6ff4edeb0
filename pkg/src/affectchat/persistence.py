"""File persistence: JSON-lines transcripts per session, JSON profiles per user.

All writes go through write-temp-then-rename so a crash mid-write never
leaves a torn file behind. Serialization is canonical (sorted keys) so a
persist/reload/persist cycle is byte-identical.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .dialogue import DialogueTurn, UserProfile
from .emotions import EmotionDistribution
from .fusion import FusedEmotionState


def _dumps(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f"{path.name}.tmp.{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def emotion_to_dict(e: FusedEmotionState) -> dict:
    return {
        "label": e.label,
        "distribution": list(e.distribution.probs),
        "visual_weight": e.visual_weight,
        "text_weight": e.text_weight,
        "timestamp_ms": e.timestamp_ms,
        "visual_present": e.visual_present,
        "text_present": e.text_present,
    }


def emotion_from_dict(raw: dict) -> FusedEmotionState:
    return FusedEmotionState(
        label=raw["label"],
        distribution=EmotionDistribution(tuple(raw["distribution"])),
        visual_weight=raw["visual_weight"],
        text_weight=raw["text_weight"],
        timestamp_ms=raw["timestamp_ms"],
        visual_present=raw["visual_present"],
        text_present=raw["text_present"],
    )


def turn_to_dict(turn: DialogueTurn) -> dict:
    return {
        "role": turn.role,
        "text": turn.text,
        "emotion": emotion_to_dict(turn.emotion) if turn.emotion else None,
        "timestamp_ms": turn.timestamp_ms,
    }


def turn_from_dict(raw: dict) -> DialogueTurn:
    emotion = raw.get("emotion")
    return DialogueTurn(
        role=raw["role"],
        text=raw["text"],
        emotion=emotion_from_dict(emotion) if emotion else None,
        timestamp_ms=raw["timestamp_ms"],
    )


class TranscriptStore:
    """One JSON-lines transcript file per session."""

    def __init__(self, data_dir: str | Path):
        self._dir = Path(data_dir) / "sessions"

    def path_for(self, session_id: str) -> Path:
        return self._dir / f"{session_id}.jsonl"

    def serialize(self, turns: tuple[DialogueTurn, ...]) -> str:
        return "".join(_dumps(turn_to_dict(t)) + "\n" for t in turns)

    def save(self, session_id: str, turns: tuple[DialogueTurn, ...]) -> Path:
        path = self.path_for(session_id)
        atomic_write_text(path, self.serialize(turns))
        return path

    def load(self, session_id: str) -> tuple[DialogueTurn, ...]:
        path = self.path_for(session_id)
        turns = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    turns.append(turn_from_dict(json.loads(line)))
        return tuple(turns)

    def exists(self, session_id: str) -> bool:
        return self.path_for(session_id).exists()


class SessionMetaStore:
    """Sidecar JSON documents tying a session id to its user and clock."""

    def __init__(self, data_dir: str | Path):
        self._dir = Path(data_dir) / "sessions"

    def path_for(self, session_id: str) -> Path:
        return self._dir / f"{session_id}.meta.json"

    def save(self, session_id: str, meta: dict) -> None:
        atomic_write_text(self.path_for(session_id), _dumps(meta) + "\n")

    def load(self, session_id: str) -> dict:
        with open(self.path_for(session_id), encoding="utf-8") as fh:
            return json.load(fh)


class ProfileStore:
    """One JSON document per user id."""

    def __init__(self, data_dir: str | Path):
        self._dir = Path(data_dir) / "profiles"

    def path_for(self, user_id: str) -> Path:
        return self._dir / f"{user_id}.json"

    def save(self, profile: UserProfile) -> Path:
        doc = {
            "user_id": profile.user_id,
            "display_name": profile.display_name,
            "traits": profile.traits,
            "preference_vector": dict(sorted(profile.preference_vector.items())),
            "updated_at_ms": profile.updated_at_ms,
        }
        path = self.path_for(profile.user_id)
        atomic_write_text(path, _dumps(doc) + "\n")
        return path

    def load(self, user_id: str) -> UserProfile:
        with open(self.path_for(user_id), encoding="utf-8") as fh:
            raw = json.load(fh)
        return UserProfile(
            user_id=raw["user_id"],
            display_name=raw["display_name"],
            traits=raw.get("traits", ""),
            preference_vector=dict(raw.get("preference_vector", {})),
            updated_at_ms=raw.get("updated_at_ms", 0.0),
        )

    def exists(self, user_id: str) -> bool:
        return self.path_for(user_id).exists()

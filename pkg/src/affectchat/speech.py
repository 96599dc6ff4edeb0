"""Turn segmentation over a timed speech-activity stream, plus ASR/TTS ports.

Voice-activity detection happens upstream: events arrive pre-labeled as
audio chunks or silence, in nondecreasing start order. A user turn closes
once contiguous silence after speech reaches the turn-delimiter threshold
(1.5 s by default, closed boundary: a gap exactly at the threshold splits).
"""

from __future__ import annotations

import asyncio
import json
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, replace
from typing import Protocol

DEFAULT_SILENCE_THRESHOLD_MS = 1500.0
MOCK_TTS_MS_PER_WORD = 60.0

EVENT_KINDS = ("audio_chunk", "silence")


class TranscriptionError(RuntimeError):
    """The transcription port failed for a turn."""


class SynthesisError(RuntimeError):
    """The synthesis port failed for a response."""


@dataclass(frozen=True)
class SpeechEvent:
    """One pre-labeled span of the activity stream."""

    kind: str
    start_ms: float
    end_ms: float
    audio_ref: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind: {self.kind!r}")
        if self.end_ms <= self.start_ms:
            raise ValueError(f"event must have positive duration: [{self.start_ms}, {self.end_ms}]")
        if self.kind == "audio_chunk" and not self.audio_ref:
            raise ValueError("audio_chunk events need an audio_ref")


@dataclass(frozen=True)
class TurnEvent:
    """One closed user turn: its audio handles and, later, its transcript."""

    utterance_id: str
    audio: tuple[str, ...]
    transcript: str | None
    t_speech_end: float

    @property
    def discardable(self) -> bool:
        """True once transcription produced an empty string."""
        return self.transcript == ""


def segment_turns(
    events: Iterable[SpeechEvent],
    silence_threshold_ms: float = DEFAULT_SILENCE_THRESHOLD_MS,
    id_prefix: str = "u",
) -> Iterator[TurnEvent]:
    """Split an ordered activity stream into turns at the silence threshold.

    Contiguous silence is whatever time passes without speech, whether it
    arrives as explicit silence events or as gaps between chunks. Trailing
    unclosed audio is flushed when the stream ends. Utterance ids are unique
    and monotonic within one generator instance (one session).
    """
    chunks: list[str] = []
    last_speech_end = 0.0
    last_start = float("-inf")
    counter = 0

    def close() -> TurnEvent:
        nonlocal chunks, counter
        counter += 1
        turn = TurnEvent(
            utterance_id=f"{id_prefix}{counter:04d}",
            audio=tuple(chunks),
            transcript=None,
            t_speech_end=last_speech_end,
        )
        chunks = []
        return turn

    for event in events:
        if event.start_ms < last_start:
            raise ValueError("events must arrive in nondecreasing start order")
        last_start = event.start_ms
        if event.kind == "audio_chunk":
            if chunks and event.start_ms - last_speech_end >= silence_threshold_ms:
                yield close()
            assert event.audio_ref is not None
            chunks.append(event.audio_ref)
            last_speech_end = max(last_speech_end, event.end_ms)
        else:
            if chunks and event.end_ms - last_speech_end >= silence_threshold_ms:
                yield close()
    if chunks:
        yield close()


def load_speech_trace(path: str) -> list[SpeechEvent]:
    """Read a JSON-lines event trace file."""
    events = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                events.append(
                    SpeechEvent(
                        kind=raw["kind"],
                        start_ms=float(raw["start_ms"]),
                        end_ms=float(raw["end_ms"]),
                        audio_ref=raw.get("audio_ref"),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad trace line: {exc}") from exc
    return events


class TranscriptionPort(Protocol):
    async def transcribe(self, audio: tuple[str, ...]) -> str:
        """Return the transcript for an ordered set of audio handles."""
        ...


class SynthesisPort(Protocol):
    async def synthesize(self, text: str) -> "SynthesisResult":
        """Render text to a playable audio handle."""
        ...


@dataclass(frozen=True)
class SynthesisResult:
    handle: str | None
    duration_ms: float
    degraded: bool = False


async def transcribe(turn: TurnEvent, asr: TranscriptionPort) -> TurnEvent:
    """Attach the port's transcript to the turn.

    Port failures surface as :class:`TranscriptionError`; the orchestrator
    answers those with a re-prompt instead of a dialogue turn.
    """
    try:
        text = await asr.transcribe(turn.audio)
    except Exception as exc:
        raise TranscriptionError(f"transcription failed for {turn.utterance_id}: {exc}") from exc
    return replace(turn, transcript=text)


async def synthesize(text: str, tts: SynthesisPort) -> SynthesisResult:
    """Render the response; on failure flag text-only delivery instead of raising."""
    if not text:
        raise ValueError("cannot synthesize empty text")
    try:
        return await tts.synthesize(text)
    except Exception:
        return SynthesisResult(handle=None, duration_ms=0.0, degraded=True)


class MockASR:
    """Fixture-driven transcription: audio_ref -> text, joined per turn."""

    def __init__(self, fixture: dict[str, str] | None = None, delay_ms: float = 0.0, fail: bool = False):
        self._fixture = fixture or {}
        self._delay_ms = delay_ms
        self._fail = fail

    @classmethod
    def from_file(cls, path: str, delay_ms: float = 0.0) -> "MockASR":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh), delay_ms=delay_ms)

    async def transcribe(self, audio: tuple[str, ...]) -> str:
        if self._delay_ms:
            await asyncio.sleep(self._delay_ms / 1000.0)
        if self._fail:
            raise TranscriptionError("scripted transcription failure")
        return " ".join(filter(None, (self._fixture.get(ref, "") for ref in audio))).strip()


class MockTTS:
    """Stub synthesis: 60 ms per whitespace-separated word."""

    def __init__(self, delay_ms: float = 0.0, fail: bool = False):
        self._delay_ms = delay_ms
        self._fail = fail
        self._counter = 0

    async def synthesize(self, text: str) -> SynthesisResult:
        if self._delay_ms:
            await asyncio.sleep(self._delay_ms / 1000.0)
        if self._fail:
            raise SynthesisError("scripted synthesis failure")
        self._counter += 1
        duration = MOCK_TTS_MS_PER_WORD * len(text.split())
        return SynthesisResult(handle=f"tts-{self._counter:04d}", duration_ms=duration)

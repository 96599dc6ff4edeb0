"""Per-utterance pipeline wiring, session ownership, and latency accounting.

One utterance flows through: transcription and visual classification running
concurrently, sentiment and fusion once the transcript lands, the
speech-triggered planner reset, prompt composition (never before the fused
state is final), generation, synthesis, then history/profile updates and
persistence. Stage spans are measured against the running event loop's
clock, so tests can drive the whole pipeline on simulated time.
"""

from __future__ import annotations

import asyncio
import logging
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from . import dialogue, fusion, planner as planner_mod, speech
from .dialogue import (
    DialogueHistory,
    DialogueTurn,
    GenerationParams,
    PromptTemplateSet,
    UserProfile,
)
from .fusion import FusedEmotionState, ModalityWeights
from .persistence import (
    ProfileStore,
    SessionMetaStore,
    TranscriptStore,
    emotion_to_dict,
    turn_to_dict,
)
from .planner import ActionCommand, ActionSink, ActionTable, PlannerState, RecordingSink
from .sentiment import ValenceLexicon, sentiment_score, sentiment_to_distribution
from .speech import SynthesisResult, TranscriptionError, TurnEvent
from .vision import Detection

logger = logging.getLogger(__name__)

# Stage timings are normalized to microsecond precision; anything finer is
# clock-representation noise.
_STAGE_PRECISION = 3
_SUM_SLACK_MS = 0.01


class SessionNotFoundError(KeyError):
    """No session with the requested id exists."""


class VisionPort(Protocol):
    async def classify(self, frame: object) -> list[Detection]:
        """Detect faces and their emotion scores on one frame handle."""
        ...


class EventPublisher(Protocol):
    def publish(self, session_id: str, kind: str, payload: dict) -> None:
        """Push one typed event onto the session's stream."""
        ...


class NullPublisher:
    def publish(self, session_id: str, kind: str, payload: dict) -> None:
        pass


@dataclass(frozen=True)
class LatencyReport:
    """Per-stage durations in milliseconds; segmentation wait is excluded."""

    asr_ms: float
    emotion_ms: float
    compose_ms: float
    llm_ms: float
    tts_ms: float
    total_ms: float
    overlap_saved_ms: float

    def __post_init__(self) -> None:
        stages = (self.asr_ms, self.emotion_ms, self.compose_ms, self.llm_ms, self.tts_ms)
        if any(v < 0.0 for v in stages) or self.total_ms < 0.0 or self.overlap_saved_ms < 0.0:
            raise ValueError(f"latency values must be nonnegative: {self}")
        if self.total_ms > sum(stages) + _SUM_SLACK_MS:
            raise ValueError(f"total exceeds the stage sum: {self}")

    @classmethod
    def from_checkpoints(
        cls,
        t0: float,
        t_asr: float,
        t_emotion: float,
        t_compose: float,
        t_llm: float,
        t_tts: float,
        vision_span_ms: float,
    ) -> "LatencyReport":
        def ms(x: float) -> float:
            return round(x, _STAGE_PRECISION)

        asr = ms(t_asr - t0)
        emotion = ms((t_emotion - t_asr) + vision_span_ms)
        compose = ms(t_compose - t_emotion)
        llm = ms(t_llm - t_compose)
        tts = ms(t_tts - t_llm)
        total = ms(t_tts - t0)
        saved = max(0.0, ms(asr + emotion + compose + llm + tts - total))
        return cls(asr, emotion, compose, llm, tts, total, saved)

    def as_dict(self) -> dict:
        return {
            "asr_ms": self.asr_ms,
            "emotion_ms": self.emotion_ms,
            "compose_ms": self.compose_ms,
            "llm_ms": self.llm_ms,
            "tts_ms": self.tts_ms,
            "total_ms": self.total_ms,
            "overlap_saved_ms": self.overlap_saved_ms,
        }


@dataclass
class Session:
    """All per-conversation state; one pipeline execution at a time."""

    session_id: str
    profile: UserProfile
    history: DialogueHistory
    planner: PlannerState
    last_emotion: FusedEmotionState | None
    created_at_ms: float
    lock: asyncio.Lock = field(default_factory=asyncio.Lock, repr=False)
    text_turn_seq: int = 0

    def next_text_utterance_id(self) -> str:
        self.text_turn_seq += 1
        return f"{self.session_id}-t{self.text_turn_seq:04d}"


@dataclass(frozen=True)
class PipelineResult:
    utterance_id: str
    user_text: str
    response_text: str
    degraded: bool
    reprompt: bool
    emotion: FusedEmotionState | None
    actions: tuple[ActionCommand, ...]
    synthesis: SynthesisResult | None
    latency: LatencyReport
    trace: tuple[tuple[str, float], ...]


@dataclass
class OrchestratorSettings:
    """The knobs handle_utterance consults, lifted out of AppConfig."""

    weights: ModalityWeights = ModalityWeights()
    visual_staleness_ms: float = fusion.VISUAL_STALENESS_MS
    token_budget: int = dialogue.DEFAULT_TOKEN_BUDGET
    preference_decay: float = dialogue.DEFAULT_PREFERENCE_DECAY
    preference_cap: int = dialogue.DEFAULT_PREFERENCE_CAP
    generation_params: GenerationParams = GenerationParams()
    llm_timeout_ms: float = 30_000.0
    fallback_responses: tuple[str, ...] = dialogue.DEFAULT_FALLBACKS
    reprompt_text: str = "Sorry, I didn't catch that. Could you say it again?"


class SessionManager:
    """Creates, indexes, persists, and reloads sessions."""

    def __init__(self, data_dir: str | Path):
        self.transcripts = TranscriptStore(data_dir)
        self.profiles = ProfileStore(data_dir)
        self.meta = SessionMetaStore(data_dir)
        self._sessions: dict[str, Session] = {}

    def create(
        self,
        user_id: str | None = None,
        display_name: str = "",
        traits: str = "",
        token_budget: int = dialogue.DEFAULT_TOKEN_BUDGET,
    ) -> Session:
        uid = user_id or f"user-{uuid.uuid4().hex[:8]}"
        if self.profiles.exists(uid):
            profile = self.profiles.load(uid)
            if display_name:
                profile = UserProfile(
                    user_id=uid,
                    display_name=display_name,
                    traits=traits or profile.traits,
                    preference_vector=profile.preference_vector,
                    updated_at_ms=profile.updated_at_ms,
                )
        else:
            profile = UserProfile(user_id=uid, display_name=display_name or uid, traits=traits)
        session = Session(
            session_id=f"s-{uuid.uuid4().hex[:12]}",
            profile=profile,
            history=DialogueHistory(token_budget=token_budget),
            planner=PlannerState(),
            last_emotion=None,
            created_at_ms=time.time() * 1000.0,
        )
        self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionNotFoundError(session_id) from None

    def snapshot(self, session: Session) -> dict:
        return {
            "session_id": session.session_id,
            "user": {
                "user_id": session.profile.user_id,
                "display_name": session.profile.display_name,
                "traits": session.profile.traits,
                "preference_vector": dict(sorted(session.profile.preference_vector.items())),
            },
            "history": [turn_to_dict(t) for t in session.history.turns],
            "last_emotion": emotion_to_dict(session.last_emotion) if session.last_emotion else None,
            "created_at_ms": session.created_at_ms,
        }

    def persist(self, session: Session) -> None:
        """Write transcript, profile, and session metadata (each atomically)."""
        self.transcripts.save(session.session_id, session.history.turns)
        self.profiles.save(session.profile)
        self.meta.save(
            session.session_id,
            {
                "session_id": session.session_id,
                "user_id": session.profile.user_id,
                "created_at_ms": session.created_at_ms,
                "token_budget": session.history.token_budget,
            },
        )

    def load(self, session_id: str) -> Session:
        """Reconstruct a persisted session from disk (planner starts idle)."""
        meta = self.meta.load(session_id)
        turns = self.transcripts.load(session_id)
        profile = self.profiles.load(meta["user_id"])
        last_emotion = None
        for turn in reversed(turns):
            if turn.emotion is not None:
                last_emotion = turn.emotion
                break
        session = Session(
            session_id=session_id,
            profile=profile,
            history=DialogueHistory(turns=turns, token_budget=meta.get("token_budget", dialogue.DEFAULT_TOKEN_BUDGET)),
            planner=PlannerState(),
            last_emotion=last_emotion,
            created_at_ms=meta.get("created_at_ms", 0.0),
        )
        self._sessions[session_id] = session
        return session


class Orchestrator:
    """Runs the per-utterance pipeline against the configured ports."""

    def __init__(
        self,
        manager: SessionManager,
        *,
        lexicon: ValenceLexicon,
        action_table: ActionTable,
        templates: PromptTemplateSet,
        asr: speech.TranscriptionPort,
        tts: speech.SynthesisPort,
        llm: dialogue.GenerationPort,
        vision: VisionPort | None = None,
        sink: ActionSink | None = None,
        events: EventPublisher | None = None,
        settings: OrchestratorSettings | None = None,
    ):
        self.manager = manager
        self._lexicon = lexicon
        self._table = action_table
        self._templates = templates
        self._asr = asr
        self._tts = tts
        self._llm = llm
        self._vision = vision
        self.sink = sink if sink is not None else RecordingSink()
        self.events = events if events is not None else NullPublisher()
        self.settings = settings or OrchestratorSettings()

    @staticmethod
    def _now_ms() -> float:
        return asyncio.get_running_loop().time() * 1000.0

    async def handle_utterance(
        self,
        session: Session,
        turn: TurnEvent,
        frame: object | None = None,
        frame_captured_at_ms: float | None = None,
    ) -> PipelineResult:
        """Run one utterance through the full pipeline.

        Executions for one session are serialized on the session lock;
        independent sessions run concurrently.
        """
        async with session.lock:
            return await self._run(session, turn, frame, frame_captured_at_ms)

    async def _run(
        self,
        session: Session,
        turn: TurnEvent,
        frame: object | None,
        frame_captured_at_ms: float | None,
    ) -> PipelineResult:
        trace: list[tuple[str, float]] = []

        def mark(name: str) -> float:
            t = self._now_ms()
            trace.append((name, t))
            return t

        t0 = mark("pipeline_start")
        vision_span_ms = 0.0

        async def run_vision() -> list[Detection]:
            nonlocal vision_span_ms
            started = self._now_ms()
            try:
                detections = await self._vision.classify(frame)  # type: ignore[union-attr]
            except Exception:
                logger.warning("vision unavailable; falling back to text-only emotion", exc_info=True)
                detections = []
            vision_span_ms = self._now_ms() - started
            mark("vision_done")
            return detections

        vision_task: asyncio.Task | None = None
        if frame is not None and self._vision is not None:
            vision_task = asyncio.create_task(run_vision())

        # (a) transcription, concurrent with visual classification.
        if turn.transcript is None:
            try:
                turn = await speech.transcribe(turn, self._asr)
            except TranscriptionError:
                logger.warning("transcription failed for %s; re-prompting", turn.utterance_id)
                return await self._reprompt(session, turn, vision_task, trace, t0)
        t_asr = mark("asr_done")
        if not turn.transcript:
            return await self._reprompt(session, turn, vision_task, trace, t0)

        # (b) emotion evidence: visual (if any) plus textual sentiment.
        visual_dist = None
        if vision_task is not None:
            detections = await vision_task
            face = fusion.select_face(detections)
            if face is not None:
                now = self._now_ms()
                captured = frame_captured_at_ms if frame_captured_at_ms is not None else now
                if not fusion.visual_is_stale(captured, now, self.settings.visual_staleness_ms):
                    visual_dist = face.scores
        text_dist = sentiment_to_distribution(sentiment_score(turn.transcript, self._lexicon))
        e_t = fusion.fuse(visual_dist, text_dist, self.settings.weights, self._now_ms())
        mark("emotion_fused")
        session.last_emotion = e_t
        self.events.publish(
            session.session_id,
            "emotion_update",
            {
                "utterance_id": turn.utterance_id,
                "label": e_t.label,
                "distribution": e_t.distribution.as_dict(),
                "visual_weight": e_t.visual_weight,
                "text_weight": e_t.text_weight,
            },
        )

        # (c) speech-triggered planner reset, then whatever falls due now.
        reset_at = self._now_ms()
        session.planner = fusion.on_new_speech(e_t, session.planner, self._table, reset_at, turn.utterance_id)
        emitted, session.planner = planner_mod.tick(session.planner, reset_at)
        for command in emitted:
            self._deliver_action(session, command, reset_at)
        t_emotion = mark("planner_reset")

        # Prompt composition begins strictly after the fused state is final.
        user_turn = DialogueTurn(role="user", text=turn.transcript, emotion=e_t, timestamp_ms=t_emotion)
        working = dialogue.truncate_history(session.history.append(user_turn))
        bundle = dialogue.compose_prompt(
            session.profile, e_t, working, self._templates, self.settings.generation_params
        )
        t_compose = mark("compose_done")

        generation = await dialogue.generate_response(
            bundle, self._llm, self.settings.llm_timeout_ms, self.settings.fallback_responses
        )
        t_llm = mark("llm_done")

        # (d) synthesis of the response.
        synthesis = await speech.synthesize(generation.text, self._tts)
        t_tts = mark("tts_done")

        # Emit any actions that fell due while the response was being built.
        late, session.planner = planner_mod.tick(session.planner, t_tts)
        for command in late:
            self._deliver_action(session, command, t_tts)

        # (e) history and profile updates, then persistence.
        robot_turn = DialogueTurn(role="robot", text=generation.text, emotion=None, timestamp_ms=t_tts)
        session.history = session.history.append(user_turn, robot_turn)
        session.profile = dialogue.update_profile(
            session.profile,
            user_turn,
            decay=self.settings.preference_decay,
            cap=self.settings.preference_cap,
        )
        self.manager.persist(session)

        # (f) the latency report.
        latency = LatencyReport.from_checkpoints(t0, t_asr, t_emotion, t_compose, t_llm, t_tts, vision_span_ms)
        degraded = generation.degraded or synthesis.degraded
        self.events.publish(
            session.session_id,
            "response",
            {"utterance_id": turn.utterance_id, "text": generation.text, "degraded": degraded},
        )
        self.events.publish(
            session.session_id,
            "latency_report",
            {"utterance_id": turn.utterance_id, **latency.as_dict()},
        )
        return PipelineResult(
            utterance_id=turn.utterance_id,
            user_text=turn.transcript,
            response_text=generation.text,
            degraded=degraded,
            reprompt=False,
            emotion=e_t,
            actions=tuple(emitted) + tuple(late),
            synthesis=synthesis,
            latency=latency,
            trace=tuple(trace),
        )

    def _deliver_action(self, session: Session, command: ActionCommand, at_ms: float) -> None:
        try:
            self.sink.deliver(command, at_ms)
        except Exception:
            logger.warning("action sink rejected %s", command.action_id, exc_info=True)
        self.events.publish(
            session.session_id,
            "action_emitted",
            {"action_kind": command.kind, "action_id": command.action_id, "at_ms": at_ms},
        )

    async def _reprompt(
        self,
        session: Session,
        turn: TurnEvent,
        vision_task: asyncio.Task | None,
        trace: list[tuple[str, float]],
        t0: float,
    ) -> PipelineResult:
        """ASR failed or heard nothing: answer with a re-prompt, append nothing."""
        if vision_task is not None:
            vision_task.cancel()
            try:
                await vision_task
            except (asyncio.CancelledError, Exception):  # noqa: BLE001 - discard outcome
                pass
        t_end = self._now_ms()
        trace.append(("reprompt", t_end))
        latency = LatencyReport.from_checkpoints(t0, t_end, t_end, t_end, t_end, t_end, 0.0)
        text = self.settings.reprompt_text
        self.events.publish(
            session.session_id,
            "response",
            {"utterance_id": turn.utterance_id, "text": text, "degraded": True, "reprompt": True},
        )
        self.events.publish(
            session.session_id,
            "latency_report",
            {"utterance_id": turn.utterance_id, **latency.as_dict()},
        )
        return PipelineResult(
            utterance_id=turn.utterance_id,
            user_text=turn.transcript or "",
            response_text=text,
            degraded=True,
            reprompt=True,
            emotion=None,
            actions=(),
            synthesis=None,
            latency=latency,
            trace=tuple(trace),
        )

"""FastAPI application wrapping the dialogue pipeline."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles

from ..config import AppConfig
from ..orchestrator import Orchestrator, PipelineResult, Session, SessionNotFoundError
from ..runtime import build_orchestrator
from ..speech import TurnEvent, load_speech_trace, segment_turns
from .events import EventBus
from .schemas import (
    ActionInfo,
    CreateSessionRequest,
    CreateSessionResponse,
    EmotionInfo,
    ExchangeInfo,
    LatencyInfo,
    SessionStateResponse,
    TurnInfo,
    UtteranceRequest,
    UtteranceResponse,
)


def _exchange_from_result(result: PipelineResult) -> ExchangeInfo:
    emotion = None
    if result.emotion is not None:
        emotion = EmotionInfo(
            label=result.emotion.label,
            distribution=result.emotion.distribution.as_dict(),
            visual_weight=result.emotion.visual_weight,
            text_weight=result.emotion.text_weight,
        )
    return ExchangeInfo(
        utterance_id=result.utterance_id,
        user_text=result.user_text,
        response_text=result.response_text,
        degraded=result.degraded,
        reprompt=result.reprompt,
        emotion=emotion,
        actions=[ActionInfo(kind=a.kind, action_id=a.action_id) for a in result.actions],
        latency=LatencyInfo(**result.latency.as_dict()),
    )


def _resolve_trace(config: AppConfig, trace_ref: str) -> Path:
    base = Path(config.resolved_trace_dir()).resolve()
    path = (base / trace_ref).resolve()
    if base not in path.parents and path != base:
        raise HTTPException(status_code=400, detail="trace_ref escapes the trace directory")
    if not path.is_file():
        raise HTTPException(status_code=404, detail=f"trace not found: {trace_ref}")
    return path


def create_app(config: AppConfig | None = None, orchestrator: Orchestrator | None = None) -> FastAPI:
    config = config or AppConfig()
    if orchestrator is None:
        events = EventBus()
        orch = build_orchestrator(config, events=events)
    else:
        orch = orchestrator
        if not isinstance(orch.events, EventBus):
            orch.events = EventBus()
        events = orch.events

    app = FastAPI(title="affectchat", version="0.1.0")
    app.state.config = config
    app.state.orchestrator = orch
    app.state.events = events
    # The console may also be served from elsewhere (auth is a non-goal).
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    if config.console_dir and Path(config.console_dir).is_dir():
        app.mount("/console", StaticFiles(directory=config.console_dir, html=True), name="console")

    def get_session(session_id: str) -> Session:
        try:
            return orch.manager.get(session_id)
        except SessionNotFoundError:
            raise HTTPException(status_code=404, detail=f"unknown session: {session_id}") from None

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", response_model=CreateSessionResponse)
    def create_session(request: CreateSessionRequest) -> CreateSessionResponse:
        session = orch.manager.create(
            user_id=request.user_id,
            display_name=request.display_name,
            traits=request.traits,
            token_budget=config.token_budget,
        )
        return CreateSessionResponse(session_id=session.session_id, user_id=session.profile.user_id)

    @app.post("/sessions/{session_id}/utterance", response_model=UtteranceResponse)
    async def post_utterance(session_id: str, request: UtteranceRequest) -> UtteranceResponse:
        session = get_session(session_id)
        exchanges: list[ExchangeInfo] = []
        if request.text is not None:
            turn = TurnEvent(
                utterance_id=session.next_text_utterance_id(),
                audio=(),
                transcript=request.text,
                t_speech_end=0.0,
            )
            result = await orch.handle_utterance(session, turn, frame=request.frame_ref)
            exchanges.append(_exchange_from_result(result))
        else:
            assert request.trace_ref is not None
            trace_path = _resolve_trace(config, request.trace_ref)
            trace_events = load_speech_trace(str(trace_path))
            prefix = f"{session.session_id}-r"
            for turn in segment_turns(trace_events, config.silence_threshold_ms, id_prefix=prefix):
                result = await orch.handle_utterance(session, turn, frame=request.frame_ref)
                exchanges.append(_exchange_from_result(result))
        return UtteranceResponse(session_id=session_id, exchanges=exchanges)

    @app.get("/sessions/{session_id}/state", response_model=SessionStateResponse)
    def get_state(session_id: str) -> SessionStateResponse:
        session = get_session(session_id)
        snapshot = orch.manager.snapshot(session)
        return SessionStateResponse(
            session_id=snapshot["session_id"],
            user_id=snapshot["user"]["user_id"],
            display_name=snapshot["user"]["display_name"],
            traits=snapshot["user"]["traits"],
            preference_vector=snapshot["user"]["preference_vector"],
            history=[TurnInfo(**_turn_info(t)) for t in snapshot["history"]],
            last_emotion=_emotion_info(snapshot["last_emotion"]),
            created_at_ms=snapshot["created_at_ms"],
        )

    @app.get("/sessions/{session_id}/events")
    async def stream_events(session_id: str, request: Request, since: int = 0, max_events: int | None = None):
        get_session(session_id)
        last_event_id = request.headers.get("Last-Event-ID")
        if last_event_id is not None:
            try:
                since = max(since, int(last_event_id))
            except ValueError:
                pass
        generator = events.stream_sse(session_id, since=since, max_events=max_events)
        return StreamingResponse(generator, media_type="text/event-stream")

    return app


def _emotion_info(raw: dict | None) -> EmotionInfo | None:
    if raw is None:
        return None
    from ..emotions import EMOTIONS

    return EmotionInfo(
        label=raw["label"],
        distribution=dict(zip(EMOTIONS, raw["distribution"])),
        visual_weight=raw["visual_weight"],
        text_weight=raw["text_weight"],
    )


def _turn_info(raw: dict) -> dict:
    info = dict(raw)
    info["emotion"] = _emotion_info(raw.get("emotion"))
    return info

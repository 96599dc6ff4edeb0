"""Pydantic request/response models for the session service."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class CreateSessionRequest(BaseModel):
    user_id: str | None = None
    display_name: str = ""
    traits: str = ""


class CreateSessionResponse(BaseModel):
    session_id: str
    user_id: str


class UtteranceRequest(BaseModel):
    """Either direct text (bypasses ASR) or a recorded speech trace to replay."""

    text: str | None = None
    trace_ref: str | None = None
    frame_ref: str | None = None

    @model_validator(mode="after")
    def _exactly_one_input(self) -> "UtteranceRequest":
        if (self.text is None) == (self.trace_ref is None):
            raise ValueError("provide exactly one of 'text' or 'trace_ref'")
        return self


class EmotionInfo(BaseModel):
    label: str
    distribution: dict[str, float]
    visual_weight: float
    text_weight: float


class LatencyInfo(BaseModel):
    asr_ms: float
    emotion_ms: float
    compose_ms: float
    llm_ms: float
    tts_ms: float
    total_ms: float
    overlap_saved_ms: float


class ActionInfo(BaseModel):
    kind: str
    action_id: str


class ExchangeInfo(BaseModel):
    utterance_id: str
    user_text: str
    response_text: str
    degraded: bool
    reprompt: bool
    emotion: EmotionInfo | None = None
    actions: list[ActionInfo] = Field(default_factory=list)
    latency: LatencyInfo


class UtteranceResponse(BaseModel):
    session_id: str
    exchanges: list[ExchangeInfo]


class TurnInfo(BaseModel):
    role: str
    text: str
    emotion: EmotionInfo | None = None
    timestamp_ms: float


class SessionStateResponse(BaseModel):
    session_id: str
    user_id: str
    display_name: str
    traits: str
    preference_vector: dict[str, float]
    history: list[TurnInfo]
    last_emotion: EmotionInfo | None = None
    created_at_ms: float

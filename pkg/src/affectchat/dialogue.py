"""Prompt composition, response generation, and the dynamic user profile.

The prompt is an ordered concatenation of four configured sections (persona,
conversational quality, adaptive personalization, emotional state) followed
by the serialized dialogue history. The profile's preference vector is a
decaying content-token frequency map updated after every user turn. The
response generator is a port; timeouts and failures degrade to a configured
static fallback instead of breaking the exchange.
"""

from __future__ import annotations

import asyncio
import hashlib
import json
import re
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Protocol

from .fusion import FusedEmotionState

DEFAULT_PREFERENCE_DECAY = 0.95
DEFAULT_PREFERENCE_CAP = 64
DEFAULT_TOKEN_BUDGET = 512
TOP_PREFERENCES = 5

DEFAULT_FALLBACKS = (
    "I see. Tell me more about that.",
    "That sounds important. What happened next?",
    "I want to make sure I understand. Could you say a bit more?",
)

STOPWORDS = frozenset(
    """a about after again all also am an and any are as at be because been before being but by can
    could did do does doing down for from had has have having he her here hers him his how i if in
    into is it its just like me more most my no nor not now of off on once only or other our out
    over own same she so some such than that the their them then there these they this those through
    to too under until up very was we were what when where which while who whom why will with would
    you your yours""".split()
)

ROLES = ("user", "robot")


class ConfigurationError(ValueError):
    """A template or configuration file is missing or malformed."""


class ContractViolationError(ValueError):
    """An operation was invoked outside its declared precondition."""


class GenerationPortError(RuntimeError):
    """The response-generation port failed."""


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.7
    max_output_tokens: int = 256


@dataclass(frozen=True)
class UserProfile:
    """Identity plus a decaying preference vector over topic tokens."""

    user_id: str
    display_name: str
    traits: str = ""
    preference_vector: dict[str, float] = field(default_factory=dict)
    updated_at_ms: float = 0.0

    def __post_init__(self) -> None:
        if any(w < 0.0 for w in self.preference_vector.values()):
            raise ValueError("preference weights must be nonnegative")

    def top_preferences(self, n: int = TOP_PREFERENCES) -> list[str]:
        """Highest-weight topics; ties resolve alphabetically."""
        ranked = sorted(self.preference_vector.items(), key=lambda kv: (-kv[1], kv[0]))
        return [token for token, _ in ranked[:n]]


@dataclass(frozen=True)
class DialogueTurn:
    role: str
    text: str
    emotion: FusedEmotionState | None
    timestamp_ms: float

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role: {self.role!r}")
        if self.role == "robot" and self.emotion is not None:
            raise ValueError("robot turns carry no emotion annotation")


@dataclass(frozen=True)
class DialogueHistory:
    """Chronological turns bounded by a serialized-token budget."""

    turns: tuple[DialogueTurn, ...] = ()
    token_budget: int = DEFAULT_TOKEN_BUDGET
    clipped: bool = False

    def __post_init__(self) -> None:
        if self.token_budget <= 0:
            raise ValueError("token budget must be positive")

    def append(self, *turns: DialogueTurn) -> "DialogueHistory":
        return replace(self, turns=self.turns + turns)


def serialize_turn(turn: DialogueTurn) -> str:
    return f"{turn.role.capitalize()}: {turn.text}"


def serialize_history(h: DialogueHistory) -> str:
    """Text-only serialization; emotion annotations stay internal."""
    return "\n".join(serialize_turn(t) for t in h.turns)


def _turn_tokens(turn: DialogueTurn) -> int:
    return len(serialize_turn(turn).split())


def truncate_history(h: DialogueHistory) -> DialogueHistory:
    """Drop oldest turns until the serialization fits the token budget.

    The most recent user turn always survives; if it alone exceeds the
    budget its text is clipped to the trailing tokens and the history is
    flagged.
    """
    total = sum(_turn_tokens(t) for t in h.turns)
    if total <= h.token_budget:
        return h
    last_user_idx = None
    for i in range(len(h.turns) - 1, -1, -1):
        if h.turns[i].role == "user":
            last_user_idx = i
            break
    kept = list(h.turns)
    while kept and total > h.token_budget:
        if last_user_idx is not None and len(h.turns) - len(kept) == last_user_idx:
            break
        total -= _turn_tokens(kept[0])
        kept.pop(0)
    if kept and sum(_turn_tokens(t) for t in kept) > h.token_budget:
        # A single oversized turn: keep the trailing tokens of its text.
        head = kept[0]
        words = serialize_turn(head).split()
        keep_words = max(1, h.token_budget - sum(_turn_tokens(t) for t in kept[1:]) - 1)
        clipped_text = " ".join(words[-keep_words:])
        kept[0] = replace(head, text=clipped_text)
        return replace(h, turns=tuple(kept), clipped=True)
    return replace(h, turns=tuple(kept))


def content_tokens(text: str) -> list[str]:
    """Lowercased word tokens with stopwords removed."""
    return [t for t in re.findall(r"[a-z0-9']+", text.lower()) if t not in STOPWORDS]


def update_profile(
    p: UserProfile,
    user_turn: DialogueTurn,
    decay: float = DEFAULT_PREFERENCE_DECAY,
    cap: int = DEFAULT_PREFERENCE_CAP,
) -> UserProfile:
    """Decay every weight, then credit each content token of the turn.

    The vector stays within ``cap`` entries by evicting the lowest weights
    (ties evict the alphabetically-first token).
    """
    if user_turn.role != "user":
        raise ContractViolationError("profiles update from user turns only")
    if not 0.0 < decay <= 1.0:
        raise ValueError(f"decay must lie in (0, 1], got {decay}")
    vector = {token: weight * decay for token, weight in p.preference_vector.items()}
    for token in content_tokens(user_turn.text):
        vector[token] = vector.get(token, 0.0) + 1.0
    if len(vector) > cap:
        ranked = sorted(vector.items(), key=lambda kv: (kv[1], kv[0]))
        for token, _ in ranked[: len(vector) - cap]:
            del vector[token]
    return replace(p, preference_vector=vector, updated_at_ms=user_turn.timestamp_ms)


@dataclass(frozen=True)
class PromptTemplateSet:
    """The four configured section templates, wording owned by configuration."""

    persona: str
    quality: str
    adaptive: str
    emotion: str

    SECTION_FILES = ("persona.txt", "quality.txt", "adaptive.txt", "emotion.txt")

    @classmethod
    def from_dir(cls, template_dir: str) -> "PromptTemplateSet":
        sections = {}
        for filename in cls.SECTION_FILES:
            path = f"{template_dir}/{filename}"
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read().strip()
            except OSError as exc:
                raise ConfigurationError(f"missing prompt template section: {path}") from exc
            if not text:
                raise ConfigurationError(f"empty prompt template section: {path}")
            sections[filename.removesuffix(".txt")] = text
        return cls(**sections)

    @classmethod
    def bundled(cls) -> "PromptTemplateSet":
        base = resources.files("affectchat.data") / "templates"
        with resources.as_file(base) as path:
            return cls.from_dir(str(path))


@dataclass(frozen=True)
class PromptBundle:
    """The composed prompt: four sections plus the serialized history."""

    persona_section: str
    quality_section: str
    adaptive_section: str
    emotion_section: str
    serialized_history: str
    generation_params: GenerationParams = GenerationParams()

    def __post_init__(self) -> None:
        for name in ("persona_section", "quality_section", "adaptive_section", "emotion_section"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")

    def serialize(self) -> str:
        parts = [
            self.persona_section,
            self.quality_section,
            self.adaptive_section,
            self.emotion_section,
        ]
        if self.serialized_history:
            parts.append(self.serialized_history)
        return "\n\n".join(parts)

    @property
    def request_hash(self) -> str:
        return hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()


def compose_prompt(
    p: UserProfile,
    e: FusedEmotionState,
    h: DialogueHistory,
    templates: PromptTemplateSet,
    params: GenerationParams = GenerationParams(),
) -> PromptBundle:
    """Deterministically render the four sections around the fused emotion.

    Expects ``h`` to be truncated already. The adaptive section embeds the
    display name, traits, and top-5 preference topics; the emotion section
    names the fused label and directs the responder to acknowledge it before
    the content of the reply.
    """
    preferences = ", ".join(p.top_preferences()) or "none recorded yet"
    try:
        adaptive = templates.adaptive.format(
            display_name=p.display_name,
            traits=p.traits or "none recorded yet",
            top_preferences=preferences,
        )
        emotion = templates.emotion.format(emotion=e.label)
    except (KeyError, IndexError) as exc:
        raise ConfigurationError(f"unknown placeholder in prompt template: {exc}") from exc
    return PromptBundle(
        persona_section=templates.persona,
        quality_section=templates.quality,
        adaptive_section=adaptive,
        emotion_section=emotion,
        serialized_history=serialize_history(h),
        generation_params=params,
    )


class GenerationPort(Protocol):
    async def complete(self, prompt: str, params: GenerationParams) -> tuple[str, dict]:
        """Return (completion text, usage metadata) for a serialized prompt."""
        ...


@dataclass(frozen=True)
class GenerationResult:
    text: str
    usage: dict
    degraded: bool = False


def _pick_fallback(bundle: PromptBundle, fallbacks: Sequence[str]) -> str:
    index = int(bundle.request_hash[:8], 16) % len(fallbacks)
    return fallbacks[index]


async def generate_response(
    bundle: PromptBundle,
    llm: GenerationPort,
    timeout_ms: float = 30_000.0,
    fallbacks: Sequence[str] = DEFAULT_FALLBACKS,
) -> GenerationResult:
    """Call the generation port; degrade to a static fallback on trouble.

    Trouble means a timeout, a port exception, or an empty completion; the
    degraded flag in the result metadata records which response was swapped
    in.
    """
    try:
        text, usage = await asyncio.wait_for(
            llm.complete(bundle.serialize(), bundle.generation_params),
            timeout=timeout_ms / 1000.0,
        )
        if text.strip():
            return GenerationResult(text=text, usage=usage)
        reason: str | Exception = "empty completion"
    except Exception as exc:  # noqa: BLE001 - port boundary; cancellation still propagates
        reason = exc
    return GenerationResult(
        text=_pick_fallback(bundle, fallbacks),
        usage={"error": str(reason) or reason.__class__.__name__},
        degraded=True,
    )


class ScriptedLLM:
    """Deterministic mock: request-hash -> canned response.

    Unknown hashes fall back to ``default`` when given, otherwise the port
    fails (exercising the caller's degraded path).
    """

    def __init__(self, responses: dict[str, str] | None = None, default: str | None = None, delay_ms: float = 0.0):
        self._responses = responses or {}
        self._default = default
        self._delay_ms = delay_ms

    @classmethod
    def from_file(cls, path: str, delay_ms: float = 0.0) -> "ScriptedLLM":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(raw.get("responses", {}), raw.get("default"), delay_ms=delay_ms)

    async def complete(self, prompt: str, params: GenerationParams) -> tuple[str, dict]:
        if self._delay_ms:
            await asyncio.sleep(self._delay_ms / 1000.0)
        key = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
        if key in self._responses:
            return self._responses[key], {"prompt_hash": key, "scripted": True}
        if self._default is not None:
            return self._default, {"prompt_hash": key, "scripted": False}
        raise GenerationPortError(f"no scripted response for prompt hash {key[:12]}")


class EchoLLM:
    """Mock that answers with the tail of the prompt it was sent.

    The echo is collapsed to one line so transcripts stay one-turn-per-line
    readable.
    """

    def __init__(self, tail_chars: int = 120, delay_ms: float = 0.0):
        self._tail_chars = tail_chars
        self._delay_ms = delay_ms

    async def complete(self, prompt: str, params: GenerationParams) -> tuple[str, dict]:
        if self._delay_ms:
            await asyncio.sleep(self._delay_ms / 1000.0)
        text = " ".join(prompt[-self._tail_chars :].split())
        return text, {"echo": True, "prompt_chars": len(prompt)}


class FailingLLM:
    """Mock that always fails, for exercising the fallback path."""

    async def complete(self, prompt: str, params: GenerationParams) -> tuple[str, dict]:
        raise GenerationPortError("scripted generation failure")


class RemoteChatLLM:
    """Chat-completion API client; endpoint and model come from configuration.

    The API key is read from the named environment variable at call time so
    the adapter can be constructed in key-less environments.
    """

    def __init__(self, endpoint: str, model: str, api_key_env: str = "AFFECTCHAT_API_KEY", timeout_s: float = 60.0):
        self._endpoint = endpoint
        self._model = model
        self._api_key_env = api_key_env
        self._timeout_s = timeout_s

    async def complete(self, prompt: str, params: GenerationParams) -> tuple[str, dict]:
        import os

        import httpx

        api_key = os.environ.get(self._api_key_env)
        if not api_key:
            raise GenerationPortError(f"environment variable {self._api_key_env} is not set")
        payload = {
            "model": self._model,
            "messages": [{"role": "system", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        async with httpx.AsyncClient(timeout=self._timeout_s) as client:
            response = await client.post(
                self._endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {api_key}"},
            )
            response.raise_for_status()
            body = response.json()
        text = body["choices"][0]["message"]["content"]
        return text, body.get("usage", {})

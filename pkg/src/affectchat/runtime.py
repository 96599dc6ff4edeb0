"""Build the orchestrator and its ports from an AppConfig."""

from __future__ import annotations

import asyncio

from .config import AppConfig
from .dialogue import EchoLLM, GenerationParams, PromptTemplateSet, RemoteChatLLM, ScriptedLLM
from .fusion import ModalityWeights
from .orchestrator import EventPublisher, Orchestrator, OrchestratorSettings, SessionManager, VisionPort
from .planner import load_action_table
from .sentiment import ValenceLexicon
from .speech import MockASR, MockTTS
from .vision import MockBackbone, ModelFileBackbone, classify_frame


class BackboneVisionPort:
    """Async facade over a synchronous backbone plus post-processing."""

    def __init__(self, backbone, conf_threshold: float, iou_threshold: float, delay_ms: float = 0.0):
        self._backbone = backbone
        self._conf = conf_threshold
        self._iou = iou_threshold
        self._delay_ms = delay_ms

    async def classify(self, frame: object):
        if self._delay_ms:
            await asyncio.sleep(self._delay_ms / 1000.0)
        return classify_frame(frame, self._backbone, self._conf, self._iou)


def build_vision_port(config: AppConfig) -> VisionPort | None:
    adapter = config.vision_adapter
    if adapter in ("", "none"):
        return None
    if adapter == "mock":
        backbone = MockBackbone.from_file(config.vision_fixture)
    elif adapter.startswith("model:"):
        # "model:<runtime_module>:<model_path>"
        _, runtime_module, model_path = adapter.split(":", 2)
        backbone = ModelFileBackbone(model_path, runtime_module)
    else:
        raise ValueError(f"unknown vision adapter: {adapter!r}")
    return BackboneVisionPort(backbone, config.conf_threshold, config.iou_threshold, config.vision_delay_ms)


def build_llm_port(config: AppConfig):
    adapter = config.llm_adapter
    if adapter == "echo":
        return EchoLLM(delay_ms=config.llm_delay_ms)
    if adapter == "scripted":
        return ScriptedLLM.from_file(config.llm_fixture, delay_ms=config.llm_delay_ms)
    if adapter == "remote":
        return RemoteChatLLM(config.llm_endpoint, config.llm_model, config.llm_api_key_env)
    raise ValueError(f"unknown llm adapter: {adapter!r}")


def build_orchestrator(config: AppConfig, events: EventPublisher | None = None) -> Orchestrator:
    if config.asr_adapter != "mock":
        raise ValueError(f"unknown asr adapter: {config.asr_adapter!r}")
    asr = (
        MockASR.from_file(config.asr_fixture, delay_ms=config.asr_delay_ms)
        if config.asr_fixture
        else MockASR(delay_ms=config.asr_delay_ms)
    )
    if config.tts_adapter != "mock":
        raise ValueError(f"unknown tts adapter: {config.tts_adapter!r}")
    tts = MockTTS(delay_ms=config.tts_delay_ms)

    settings = OrchestratorSettings(
        weights=ModalityWeights(config.visual_weight, config.text_weight),
        visual_staleness_ms=config.visual_staleness_ms,
        token_budget=config.token_budget,
        preference_decay=config.preference_decay,
        preference_cap=config.preference_cap,
        generation_params=GenerationParams(config.temperature, config.max_output_tokens),
        llm_timeout_ms=config.llm_timeout_ms,
        fallback_responses=tuple(config.fallback_responses),
        reprompt_text=config.reprompt_text,
    )
    return Orchestrator(
        SessionManager(config.data_dir),
        lexicon=ValenceLexicon.bundled(),
        action_table=load_action_table(config.resolved_action_table()),
        templates=(
            PromptTemplateSet.from_dir(config.template_dir) if config.template_dir else PromptTemplateSet.bundled()
        ),
        asr=asr,
        tts=tts,
        llm=build_llm_port(config),
        vision=build_vision_port(config),
        events=events,
        settings=settings,
    )

"""Application configuration: adapter selection, weights, thresholds, paths.

Configuration loads from an optional JSON file and is overridable through
``AFFECTCHAT_``-prefixed environment variables (flat field names, e.g.
``AFFECTCHAT_LLM_ADAPTER`` or ``AFFECTCHAT_VISUAL_WEIGHT``).
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

ENV_PREFIX = "AFFECTCHAT_"

DEFAULT_FALLBACK_RESPONSES = [
    "I see. Tell me more about that.",
    "That sounds important. What happened next?",
    "I want to make sure I understand. Could you say a bit more?",
]
DEFAULT_REPROMPT = "Sorry, I didn't catch that. Could you say it again?"


def bundled_data_path(name: str) -> str:
    with resources.as_file(resources.files("affectchat.data") / name) as path:
        return str(path)


@dataclass
class AppConfig:
    data_dir: str = "./affectchat-data"

    # Port adapter selection. vision: none|mock; asr: mock; tts: mock; llm: echo|scripted|remote.
    vision_adapter: str = "none"
    vision_fixture: str = ""
    asr_adapter: str = "mock"
    asr_fixture: str = ""
    tts_adapter: str = "mock"
    llm_adapter: str = "echo"
    llm_fixture: str = ""
    llm_endpoint: str = ""
    llm_model: str = ""
    llm_api_key_env: str = "AFFECTCHAT_API_KEY"

    # Mock port delays, for demos and latency experiments.
    asr_delay_ms: float = 0.0
    vision_delay_ms: float = 0.0
    llm_delay_ms: float = 0.0
    tts_delay_ms: float = 0.0

    # Fusion and perception knobs.
    visual_weight: float = 0.6
    text_weight: float = 0.4
    conf_threshold: float = 0.5
    iou_threshold: float = 0.45
    visual_staleness_ms: float = 2000.0

    # Speech segmentation.
    silence_threshold_ms: float = 1500.0

    # Dialogue engine.
    action_table_path: str = ""
    template_dir: str = ""
    token_budget: int = 512
    preference_decay: float = 0.95
    preference_cap: int = 64
    temperature: float = 0.7
    max_output_tokens: int = 256
    llm_timeout_ms: float = 30000.0
    fallback_responses: list[str] = field(default_factory=lambda: list(DEFAULT_FALLBACK_RESPONSES))
    reprompt_text: str = DEFAULT_REPROMPT

    # Where trace_ref paths passed to the service are resolved.
    trace_dir: str = ""

    # Directory with the built web console (index.html + dist/); served at
    # /console when set.
    console_dir: str = ""

    seed: int = 0

    def resolved_action_table(self) -> str:
        return self.action_table_path or bundled_data_path("action_table.json")

    def resolved_template_dir(self) -> str:
        if self.template_dir:
            return self.template_dir
        return bundled_data_path("templates")

    def resolved_trace_dir(self) -> str:
        return self.trace_dir or str(Path(self.data_dir) / "traces")


def _coerce(current: object, raw: str) -> object:
    if isinstance(current, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    if isinstance(current, list):
        return json.loads(raw)
    return raw


# Input-file fields resolved relative to the config file's directory.
_INPUT_PATH_FIELDS = (
    "vision_fixture",
    "asr_fixture",
    "llm_fixture",
    "action_table_path",
    "template_dir",
    "trace_dir",
    "console_dir",
)


def load_config(path: str | None = None, env: dict[str, str] | None = None) -> AppConfig:
    """Build the config from defaults, then a JSON file, then the environment.

    Relative input paths in the file (fixtures, tables, templates, traces)
    resolve against the file's own directory; ``data_dir`` stays relative to
    the working directory since it is runtime output.
    """
    values: dict[str, object] = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            file_values = json.load(fh)
        unknown = set(file_values) - {f.name for f in dataclasses.fields(AppConfig)}
        if unknown:
            raise ValueError(f"unknown config keys in {path}: {sorted(unknown)}")
        base = Path(path).resolve().parent
        for field_name in _INPUT_PATH_FIELDS:
            value = file_values.get(field_name)
            if value and not Path(value).is_absolute():
                file_values[field_name] = str(base / value)
        values.update(file_values)
    config = AppConfig(**values)

    env = env if env is not None else dict(os.environ)
    for f in dataclasses.fields(AppConfig):
        key = ENV_PREFIX + f.name.upper()
        if key in env:
            setattr(config, f.name, _coerce(getattr(config, f.name), env[key]))
    return config

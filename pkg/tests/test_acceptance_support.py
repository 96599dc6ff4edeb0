"""Builders shared by the acceptance suite (kept separate to stay readable)."""

from __future__ import annotations

from affectchat.dialogue import EchoLLM
from affectchat.emotions import EmotionDistribution
from affectchat.fusion import fuse
from affectchat.orchestrator import Orchestrator, SessionManager
from affectchat.runtime import BackboneVisionPort
from affectchat.speech import MockASR, MockTTS
from affectchat.vision import MockBackbone

# Ten turns cycling moods: (audio ref, camera frame ref).
E2E_TRANSCRIPTS = {
    "t0": "hello there i am glad to meet you",
    "t1": "i had a wonderful day at the chess club",
    "t2": "my cat has been ill and i feel sad about it",
    "t3": "tell me something interesting about space",
    "t4": "that traffic this morning made me angry",
    "t5": "i love hearing your stories",
    "t6": "the weather has been gloomy and miserable",
    "t7": "what games do you enjoy playing",
    "t8": "my sister won her tournament and i am so proud",
    "t9": "thank you this conversation was lovely",
}

DIALOGUE_SCRIPT = [
    ("t0", "happy_face"),
    ("t1", "happy_face"),
    ("t2", "sad_face"),
    ("t3", "confused_face"),
    ("t4", "crowd"),
    ("t5", "happy_face"),
    ("t6", "sad_face"),
    ("t7", "confused_face"),
    ("t8", "happy_face"),
    ("t9", "happy_face"),
]


def fused_one_hot(label: str):
    return fuse(None, EmotionDistribution.one_hot(label), now_ms=0.0)


def build_e2e_orchestrator(
    tmp_path,
    lexicon,
    action_table,
    templates,
    backbone_fixture: dict,
    asr_delay_ms: float = 0.0,
    vision_delay_ms: float = 0.0,
    llm_delay_ms: float = 0.0,
    tts_delay_ms: float = 0.0,
) -> Orchestrator:
    manager = SessionManager(tmp_path / "e2e-data")
    return Orchestrator(
        manager,
        lexicon=lexicon,
        action_table=action_table,
        templates=templates,
        asr=MockASR(E2E_TRANSCRIPTS, delay_ms=asr_delay_ms),
        tts=MockTTS(delay_ms=tts_delay_ms),
        llm=EchoLLM(delay_ms=llm_delay_ms),
        vision=BackboneVisionPort(MockBackbone(backbone_fixture), 0.5, 0.45, delay_ms=vision_delay_ms),
    )

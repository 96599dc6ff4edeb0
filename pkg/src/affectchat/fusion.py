"""Fusing visual and textual emotion evidence into one live state.

The fused state is recomputed fresh for every detected utterance: a convex
combination of the two modality distributions when both are present, or the
surviving modality alone. Each new utterance also resets the behavior
planner so stale non-verbal feedback never outlives the emotion that caused
it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import planner as planner_mod
from .emotions import EmotionDistribution
from .vision import Detection

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-9
DEFAULT_VISUAL_WEIGHT = 0.6
DEFAULT_TEXT_WEIGHT = 0.4
# Visual evidence older than this at fusion time is treated as absent.
VISUAL_STALENESS_MS = 2000.0
# Only detections from the most recent frame window enter fusion.
FRAME_WINDOW_MS = 500.0


class NoEvidenceError(ValueError):
    """Neither modality provided a distribution; the caller keeps its prior state."""


@dataclass(frozen=True)
class ModalityWeights:
    """Convex weighting of the visual and textual modalities."""

    w_visual: float = DEFAULT_VISUAL_WEIGHT
    w_text: float = DEFAULT_TEXT_WEIGHT

    def __post_init__(self) -> None:
        if self.w_visual < 0.0 or self.w_text < 0.0:
            raise ValueError(f"weights must be nonnegative: ({self.w_visual}, {self.w_text})")
        if abs(self.w_visual + self.w_text - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1: ({self.w_visual}, {self.w_text})")


@dataclass(frozen=True)
class FusedEmotionState:
    """Per-utterance emotional estimate combining both modalities."""

    label: str
    distribution: EmotionDistribution
    visual_weight: float
    text_weight: float
    timestamp_ms: float
    visual_present: bool
    text_present: bool

    def __post_init__(self) -> None:
        if abs(self.visual_weight + self.text_weight - 1.0) > WEIGHT_TOL:
            raise ValueError("modality weights must sum to 1")
        if self.label != self.distribution.label:
            raise ValueError("label must be the distribution argmax")


def fuse(
    visual: EmotionDistribution | None,
    textual: EmotionDistribution | None,
    w: ModalityWeights = ModalityWeights(),
    now_ms: float = 0.0,
) -> FusedEmotionState:
    """Combine available modality distributions into the fused state.

    With both modalities present the result is the normalized convex
    combination; a single modality passes through with full weight. The
    label is the deterministic argmax of the fused distribution.
    """
    if visual is None and textual is None:
        raise NoEvidenceError("at least one modality distribution is required")
    if visual is not None and textual is not None and w.w_visual > 0.0 and w.w_text > 0.0:
        combined = EmotionDistribution.from_values(
            w.w_visual * v + w.w_text * t for v, t in zip(visual.probs, textual.probs)
        )
        vw, tw = w.w_visual, w.w_text
    elif visual is not None and (textual is None or w.w_visual == 1.0):
        # A zero-weight modality passes the other through bit-exactly.
        combined, vw, tw = visual, 1.0, 0.0
    else:
        assert textual is not None
        combined, vw, tw = textual, 0.0, 1.0
    return FusedEmotionState(
        label=combined.label,
        distribution=combined,
        visual_weight=vw,
        text_weight=tw,
        timestamp_ms=now_ms,
        visual_present=visual is not None,
        text_present=textual is not None,
    )


def select_face(detections: list[Detection]) -> Detection | None:
    """Pick the single face whose scores enter fusion.

    Multi-face scenes take the largest box; exact-area ties fall back to
    confidence, then canonical box field order, for determinism.
    """
    if not detections:
        return None
    return min(
        detections,
        key=lambda d: (-d.box.area, -d.confidence, d.box.cx, d.box.cy, d.box.w, d.box.h),
    )


def visual_is_stale(captured_at_ms: float, now_ms: float, max_age_ms: float = VISUAL_STALENESS_MS) -> bool:
    return now_ms - captured_at_ms >= max_age_ms


def on_new_speech(
    e_t: FusedEmotionState,
    state: planner_mod.PlannerState,
    table: planner_mod.ActionTable,
    now_ms: float,
    utterance_id: str,
) -> planner_mod.PlannerState:
    """Speech-triggered planner update: cancel in-flight feedback, start fresh.

    Idempotent per utterance id. Planner trouble is logged and swallowed so
    the dialogue proceeds without non-verbal feedback.
    """
    try:
        return planner_mod.reset(state, e_t, table, now_ms, utterance_id)
    except Exception:
        logger.exception("behavior planner unavailable; continuing without non-verbal feedback")
        return state

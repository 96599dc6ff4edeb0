"""Modality fusion and the speech-triggered planner reset."""

from __future__ import annotations

import random

import pytest

from affectchat.emotions import EMOTIONS, EmotionDistribution
from affectchat.fusion import (
    FusedEmotionState,
    ModalityWeights,
    NoEvidenceError,
    fuse,
    on_new_speech,
    select_face,
    visual_is_stale,
)
from affectchat.planner import PlannerState
from affectchat.vision import BoundingBox, Detection


def random_distribution(rng: random.Random) -> EmotionDistribution:
    return EmotionDistribution.from_values([rng.uniform(0.01, 1.0) for _ in EMOTIONS])


def fused(label: str) -> FusedEmotionState:
    return fuse(None, EmotionDistribution.one_hot(label), now_ms=0.0)


class TestFuse:
    def test_agreeing_one_hots(self):
        happy = EmotionDistribution.one_hot("happy")
        state = fuse(happy, happy, ModalityWeights(0.6, 0.4), now_ms=12.0)
        assert state.label == "happy"
        assert state.distribution.prob("happy") == pytest.approx(1.0)
        assert state.visual_present and state.text_present

    def test_hand_arithmetic(self):
        visual = EmotionDistribution.from_mapping({"sad": 0.5, "neutral": 0.5})
        textual = EmotionDistribution.one_hot("neutral")
        state = fuse(visual, textual, ModalityWeights(0.6, 0.4), now_ms=0.0)
        assert state.distribution.prob("sad") == pytest.approx(0.3, abs=1e-12)
        assert state.distribution.prob("neutral") == pytest.approx(0.7, abs=1e-12)
        assert state.label == "neutral"

    def test_text_only_fallback(self):
        state = fuse(None, EmotionDistribution.one_hot("happy"), now_ms=5.0)
        assert state.label == "happy"
        assert state.text_weight == 1.0 and state.visual_weight == 0.0
        assert not state.visual_present

    def test_visual_only_fallback(self):
        state = fuse(EmotionDistribution.one_hot("sad"), None, now_ms=5.0)
        assert state.visual_weight == 1.0
        assert not state.text_present

    def test_no_evidence_raises(self):
        with pytest.raises(NoEvidenceError):
            fuse(None, None)

    def test_weight_consistency_is_exact(self):
        rng = random.Random(99)
        for _ in range(100):
            visual = random_distribution(rng)
            textual = random_distribution(rng)
            assert fuse(visual, textual, ModalityWeights(1.0, 0.0)).distribution.probs == visual.probs
            assert fuse(visual, textual, ModalityWeights(0.0, 1.0)).distribution.probs == textual.probs

    def test_label_ties_break_canonically(self):
        visual = EmotionDistribution.from_mapping({"sad": 0.5, "happy": 0.5})
        state = fuse(visual, None)
        assert state.label == "happy"  # happy precedes sad in canonical order

    def test_argmax_invariant_under_prenormalization_scaling(self):
        rng = random.Random(5)
        for _ in range(200):
            raw_v = [rng.uniform(0.05, 1.0) for _ in EMOTIONS]
            raw_t = [rng.uniform(0.05, 1.0) for _ in EMOTIONS]
            scale = rng.choice([0.25, 0.5, 2.0, 10.0])
            base = fuse(
                EmotionDistribution.from_values(raw_v),
                EmotionDistribution.from_values(raw_t),
            )
            scaled = fuse(
                EmotionDistribution.from_values([scale * v for v in raw_v]),
                EmotionDistribution.from_values([scale * t for t in raw_t]),
            )
            assert base.label == scaled.label

    def test_weights_validate(self):
        with pytest.raises(ValueError):
            ModalityWeights(0.7, 0.7)
        with pytest.raises(ValueError):
            ModalityWeights(-0.1, 1.1)


class TestSelectFace:
    def _det(self, area_side: float, peak: float) -> Detection:
        scores = EmotionDistribution.from_values([peak, 1, 1, 1, 1, 1, 1])
        return Detection(BoundingBox(0.5, 0.5, area_side, area_side), scores)

    def test_largest_box_wins(self):
        small = self._det(0.1, 9.0)
        large = self._det(0.4, 2.0)
        assert select_face([small, large]) is large

    def test_area_tie_falls_back_to_confidence(self):
        weak = self._det(0.2, 2.0)
        strong = self._det(0.2, 9.0)
        assert select_face([weak, strong]) is strong

    def test_empty(self):
        assert select_face([]) is None


class TestStaleness:
    def test_boundary(self):
        assert visual_is_stale(0.0, 2000.0)
        assert not visual_is_stale(0.0, 1999.0)
        assert not visual_is_stale(500.0, 1000.0)


class TestOnNewSpeech:
    def test_new_speech_replaces_sequence(self, action_table):
        state = on_new_speech(fused("happy"), PlannerState(), action_table, 0.0, "u1")
        assert state.active_label == "happy"
        happy_ids = [c.action_id for c in state.pending]
        state = on_new_speech(fused("sad"), state, action_table, 100.0, "u2")
        assert state.active_label == "sad"
        assert all(c.action_id not in happy_ids for c in state.pending)
        assert state.sequence_start_ms == 100.0

    def test_idle_start_schedules_neutral(self, action_table):
        state = on_new_speech(fused("neutral"), PlannerState(), action_table, 0.0, "u1")
        assert state.active_label == "neutral"
        assert state.pending

    def test_idempotent_per_utterance(self, action_table):
        state = on_new_speech(fused("happy"), PlannerState(), action_table, 0.0, "u1")
        again = on_new_speech(fused("sad"), state, action_table, 50.0, "u1")
        assert again is state

    def test_planner_trouble_is_swallowed(self):
        class BrokenTable:
            def sequence_for(self, label):
                raise RuntimeError("robot offline")

        before = PlannerState()
        after = on_new_speech(fused("happy"), before, BrokenTable(), 0.0, "u1")
        assert after is before

"""Acceptance suite: every primary criterion at its stated tolerance.

Each test prints one pass line once its assertions hold (visible under
``pytest -v -s tests/test_acceptance.py``). Tolerances are pinned here and
nowhere else.
"""

from __future__ import annotations

import json
import math
import random
import time

import numpy as np
import pytest

from affectchat.dialogue import UserProfile, update_profile
from affectchat.emotions import EMOTIONS, EmotionDistribution
from affectchat.fusion import ModalityWeights, fuse
from affectchat.planner import PlannerState, reset, tick
from affectchat.sentiment import sentiment_score
from affectchat.speech import SpeechEvent, TurnEvent, segment_turns
from affectchat.vision import (
    BoundingBox,
    Detection,
    LossWeights,
    MockBackbone,
    PriorBox,
    decode_detections,
    multitask_loss,
    nms,
)
from affectchat.evalsuite import (
    HashingEmbedder,
    TrigramLM,
    UniformLM,
    bleu,
    embed_similarity,
    mauve_score,
    perplexity,
)
from conftest import DATA_DIR, run_virtual
from oracles import greedy_nms_oracle, trigram_log_prob_sum
from test_acceptance_support import DIALOGUE_SCRIPT, build_e2e_orchestrator, fused_one_hot


def ok(line: str) -> None:
    print(f"[PASS] {line}")


class TestNmsOracleEquivalence:
    def test_500_random_instances(self):
        started = time.perf_counter()
        rng = random.Random(0xACCE97)
        for _ in range(500):
            dets = []
            for _i in range(rng.randint(0, 20)):
                box = BoundingBox(
                    cx=rng.uniform(0.1, 0.9),
                    cy=rng.uniform(0.1, 0.9),
                    w=rng.uniform(0.05, 0.6),
                    h=rng.uniform(0.05, 0.6),
                )
                scores = EmotionDistribution.from_values(
                    [rng.uniform(0.01, 1.0) for _ in EMOTIONS]
                )
                dets.append(Detection(box=box, scores=scores))
            conf_t = rng.choice([0.0, 0.15, 0.18, 0.25, 0.4])
            iou_t = rng.choice([0.2, 0.45, 0.5, 0.7])
            assert nms(dets, conf_t, iou_t) == greedy_nms_oracle(dets, conf_t, iou_t)
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0
        ok(f"NMS oracle equivalence: 500 random instances identical ({elapsed:.2f}s < 10s)")


class TestLossAndDecode:
    def test_weighted_sum_and_linearity(self):
        w = LossWeights(alpha=1.0, beta=0.5)
        assert multitask_loss(2.0, 1.0, w) == 2.5
        rng = random.Random(7)
        for _ in range(200):
            c, r = rng.uniform(0, 50), rng.uniform(0, 50)
            assert multitask_loss(2 * c, r, w) - multitask_loss(c, r, w) == pytest.approx(
                w.alpha * c, abs=1e-9
            )
            assert multitask_loss(c, 2 * r, w) - multitask_loss(c, r, w) == pytest.approx(
                w.beta * r, abs=1e-9
            )
        ok("Loss: (2.0, 1.0) -> 2.5 at alpha=1, beta=0.5; linear in each term")

    def test_decode_identity_on_zero_offsets(self):
        rng = random.Random(11)
        priors = [
            PriorBox(
                cx=rng.uniform(0.2, 0.8),
                cy=rng.uniform(0.2, 0.8),
                w=rng.uniform(0.05, 0.4),
                h=rng.uniform(0.05, 0.4),
            )
            for _ in range(50)
        ]
        dets = decode_detections([[0.0] * 7] * 50, [[0.0] * 4] * 50, priors)
        for det, prior in zip(dets, priors):
            assert abs(det.box.cx - prior.cx) <= 1e-9
            assert abs(det.box.cy - prior.cy) <= 1e-9
            assert abs(det.box.w - prior.w) <= 1e-9
            assert abs(det.box.h - prior.h) <= 1e-9
        ok("Decode: zero offsets reproduce prior boxes to 1e-9")


class TestSentimentOracleAgreement:
    def test_fixture_agreement(self, lexicon):
        with open(DATA_DIR / "sentiment_fixture.jsonl", encoding="utf-8") as fh:
            records = [json.loads(line) for line in fh if line.strip()]
        assert len(records) == 50
        for record in records:
            ours = sentiment_score(record["text"], lexicon).compound
            ref = record["compound"]
            assert (ours > 0) - (ours < 0) == (ref > 0) - (ref < 0), record["text"]
            assert abs(ours - ref) <= 0.05, record["text"]
        ok("Sentiment oracle: 50/50 sign agreement, max |delta| <= 0.05")


class TestFusionProperties:
    def test_1000_random_pairs(self):
        rng = random.Random(42)
        for _ in range(1000):
            raw_v = [rng.uniform(0.01, 1.0) for _ in EMOTIONS]
            raw_t = [rng.uniform(0.01, 1.0) for _ in EMOTIONS]
            visual = EmotionDistribution.from_values(raw_v)
            textual = EmotionDistribution.from_values(raw_t)

            fused_state = fuse(visual, textual, ModalityWeights(0.6, 0.4))
            assert abs(sum(fused_state.distribution.probs) - 1.0) <= 1e-6

            assert fuse(visual, textual, ModalityWeights(1.0, 0.0)).distribution.probs == visual.probs
            assert fuse(visual, textual, ModalityWeights(0.0, 1.0)).distribution.probs == textual.probs

            scale = rng.choice([0.25, 0.5, 2.0, 8.0])
            scaled = fuse(
                EmotionDistribution.from_values([scale * v for v in raw_v]),
                EmotionDistribution.from_values([scale * t for t in raw_t]),
                ModalityWeights(0.6, 0.4),
            )
            assert scaled.label == fused_state.label
        ok("Fusion: 1000 pairs normalized to 1e-6, exact weight-consistency, scale-invariant argmax")


class TestResetSafety:
    def test_1000_randomized_schedules(self, action_table):
        rng = random.Random(2024)
        for _trial in range(1000):
            state = PlannerState()
            now = 0.0
            era = -1
            emitted_by_era: dict[int, list[str]] = {}
            planned_by_era: dict[int, list[str]] = {}
            pre_reset_pending: list[str] = []
            for _step in range(rng.randint(2, 10)):
                now += rng.uniform(0.0, 800.0)
                if rng.random() < 0.45:
                    pre_reset_pending = [c.action_id for c in state.pending]
                    era += 1
                    label = rng.choice(EMOTIONS)
                    state = reset(state, fused_one_hot(label), action_table, now, f"u{era}")
                    planned_by_era[era] = [c.action_id for c in state.pending]
                    emitted_by_era[era] = []
                else:
                    due, state = tick(state, now)
                    ids = [c.action_id for c in due]
                    if era >= 0:
                        emitted_by_era[era].extend(ids)
                        # zero post-reset emissions of pre-reset commands
                        stale = set(pre_reset_pending) - set(planned_by_era[era])
                        assert not (set(ids) & stale)
                    else:
                        assert ids == []
            for e, emitted in emitted_by_era.items():
                assert len(emitted) == len(set(emitted))  # at-most-once
                assert set(emitted) <= set(planned_by_era[e])
        ok("Reset safety: 1000 schedules, zero stale emissions, at-most-once")


class TestTurnSegmentationBoundary:
    def test_threshold_boundary(self):
        def turns_for(gap_ms: float) -> int:
            events = [
                SpeechEvent("audio_chunk", 0, 1000, "a"),
                SpeechEvent("audio_chunk", 1000 + gap_ms, 2000 + gap_ms, "b"),
            ]
            return len(list(segment_turns(events, silence_threshold_ms=1500.0)))

        assert turns_for(1499) == 1
        assert turns_for(1500) == 2
        assert turns_for(1501) == 2
        ok("Segmentation: gaps 1499/1500/1501 ms -> 1/2/2 turns")


class TestMetricOracles:
    def test_bleu_three_cases(self):
        identical = [("the cat sat on the mat", "the cat sat on the mat")]
        assert bleu(identical) == pytest.approx(1.0, abs=1e-9)
        assert bleu([("alpha beta gamma", "delta epsilon zeta")]) == pytest.approx(0.0, abs=1e-9)
        assert bleu([("the cat sat", "the cat")]) == pytest.approx(math.exp(-0.5), abs=1e-9)
        ok("BLEU: identity=1, disjoint=0, short-hypothesis case = e^-0.5 (1e-9)")

    def test_perplexity_uniform_and_trigram(self):
        for v in (2, 7, 50):
            assert perplexity(["one two three four"], UniformLM(v)) == pytest.approx(
                v, rel=1e-12
            )
        train = [
            "the robot greets the visitor",
            "the visitor smiles at the robot",
            "a quiet afternoon in the lab",
            "the robot tells a story",
            "stories make the afternoon pass",
        ]
        score = [
            "the robot greets the lab",
            "a visitor smiles",
            "the afternoon story",
            "robots are unseen words here",
            "the robot tells the visitor a story",
        ]
        lm = TrigramLM.fit(train)
        total, count = trigram_log_prob_sum(train, score)
        assert perplexity(score, lm) == pytest.approx(math.exp(-total / count), abs=1e-9)
        ok("Perplexity: uniform = |V| exactly, trigram matches brute-force log-sum (1e-9)")

    def test_mauve_identity_and_disjoint(self):
        texts = [f"utterance {i} about {EMOTIONS[i % 7]} things" for i in range(20)]
        assert mauve_score(texts, list(texts), HashingEmbedder(), k_clusters=2) == pytest.approx(
            1.0, abs=1e-6
        )

        class TwoClouds:
            def embed(self, items):
                return np.asarray(
                    [[0.0 if t.startswith("h") else 1000.0, (i % 3) * 0.01] for i, t in enumerate(items)]
                )

        score = mauve_score(
            [f"h {i}" for i in range(12)],
            [f"m {i}" for i in range(12)],
            TwoClouds(),
            k_clusters=2,
            scaling_c=5.0,
        )
        lambdas = np.linspace(1e-6, 1 - 1e-6, 25)
        pts = np.asarray(
            [(1.0, 0.0)] + [((1 - lam) ** 5, lam**5) for lam in lambdas] + [(0.0, 1.0)]
        )[::-1]
        analytic = float(np.trapezoid(pts[:, 1], pts[:, 0]))
        assert score == pytest.approx(analytic, abs=1e-3)
        ok("Frontier metric: identity = 1.0 (1e-6), disjoint matches analytic frontier (1e-3)")

    def test_embed_similarity_identity(self):
        pairs = [(f"sample sentence {i} here", f"sample sentence {i} here") for i in range(10)]
        assert embed_similarity(pairs, HashingEmbedder()) == pytest.approx(1.0, abs=1e-9)
        ok("Embedding similarity: identity = 1.0")


class TestEndToEndScriptedSession:
    def test_ten_turn_dialogue(self, tmp_path, lexicon, action_table, templates, backbone_fixture):
        started = time.perf_counter()
        orch = build_e2e_orchestrator(
            tmp_path, lexicon, action_table, templates, backbone_fixture,
            asr_delay_ms=400.0, vision_delay_ms=300.0, llm_delay_ms=800.0, tts_delay_ms=200.0,
        )
        session = orch.manager.create(display_name="Ana", traits="likes chess")

        async def run_script():
            results = []
            for i, (audio_ref, frame_ref) in enumerate(DIALOGUE_SCRIPT):
                turn = TurnEvent(f"u{i:04d}", (audio_ref,), None, 0.0)
                results.append(await orch.handle_utterance(session, turn, frame=frame_ref))
            return results

        results = run_virtual(run_script())
        assert len(results) == 10

        for result in results:
            assert not result.reprompt
            names = [n for n, _ in result.trace]
            assert names.index("emotion_fused") < names.index("compose_done")
            times = dict(result.trace)
            assert times["emotion_fused"] <= times["compose_done"]
            assert result.latency.total_ms < 1700.0
            assert result.latency.overlap_saved_ms >= 300.0

        roles = [t.role for t in session.history.turns]
        assert roles == ["user", "robot"] * 10

        persisted = orch.manager.transcripts.load(session.session_id)
        assert len(persisted) == 20
        assert [t.role for t in persisted] == ["user", "robot"] * 10

        elapsed = time.perf_counter() - started
        assert elapsed < 30.0
        ok(
            "End-to-end: 10 user + 10 robot turns persisted, fused-state-before-prompt in all "
            f"traces, total < 1700 ms with overlap_saved >= 300 ms on the simulated clock "
            f"({elapsed:.2f}s < 30s)"
        )


class TestProfileDynamics:
    def test_200_random_sequences(self):
        rng = random.Random(555)
        vocabulary = ["chess", "space", "music", "tea", "dogs", "rain", "code", "art",
                      "food", "film", "golf", "yoga", "sea", "bikes", "books"]
        for _seq in range(200):
            profile = UserProfile(user_id="u", display_name="A")
            decay = rng.uniform(0.5, 1.0)
            cap = rng.randint(1, 10)
            for step in range(rng.randint(1, 25)):
                text = " ".join(rng.choices(vocabulary + ["i", "the", "a"], k=rng.randint(0, 8)))
                from affectchat.dialogue import DialogueTurn

                turn = DialogueTurn("user", text, fused_one_hot("neutral"), float(step))
                profile = update_profile(profile, turn, decay=decay, cap=cap)
                assert len(profile.preference_vector) <= cap
                assert all(w >= 0.0 for w in profile.preference_vector.values())
        ok("Profile dynamics: 200 sequences, vector <= cap, weights never negative")

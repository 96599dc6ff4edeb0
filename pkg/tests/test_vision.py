"""Detection post-processing: IoU, decode, suppression, and the training loss."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from affectchat.emotions import EMOTIONS, EmotionDistribution
from affectchat.vision import (
    BoundingBox,
    Detection,
    LossWeights,
    MockBackbone,
    PerceptionUnavailableError,
    PriorBox,
    ShapeMismatchError,
    classification_loss,
    classify_frame,
    decode_detections,
    iou,
    multitask_loss,
    nms,
    regression_loss,
    softmax,
)
from oracles import greedy_nms_oracle

boxes = st.builds(
    BoundingBox,
    cx=st.floats(0.0, 1.0),
    cy=st.floats(0.0, 1.0),
    w=st.floats(0.01, 1.0),
    h=st.floats(0.01, 1.0),
)


def random_detection(rng: random.Random) -> Detection:
    box = BoundingBox(
        cx=rng.uniform(0.1, 0.9),
        cy=rng.uniform(0.1, 0.9),
        w=rng.uniform(0.05, 0.5),
        h=rng.uniform(0.05, 0.5),
    )
    raw = [rng.uniform(0.0, 1.0) for _ in EMOTIONS]
    scores = EmotionDistribution.from_values(raw)
    return Detection(box=box, scores=scores)


class TestIou:
    def test_identical_boxes(self):
        box = BoundingBox(0.5, 0.5, 0.2, 0.3)
        assert iou(box, box) == 1.0

    def test_disjoint_boxes(self):
        assert iou(BoundingBox(0.2, 0.2, 0.1, 0.1), BoundingBox(0.8, 0.8, 0.1, 0.1)) == 0.0

    def test_hand_computed_overlap(self):
        # Corner boxes (0,0,2,2) and (1,1,3,3): intersection 1, union 7.
        a = BoundingBox.from_corners(0, 0, 2, 2)
        b = BoundingBox.from_corners(1, 1, 3, 3)
        assert iou(a, b) == pytest.approx(1.0 / 7.0, abs=1e-12)

    def test_degenerate_box_rejected(self):
        with pytest.raises(ValueError):
            BoundingBox(0.5, 0.5, 0.0, 0.1)

    @given(a=boxes, b=boxes)
    def test_symmetric_and_bounded(self, a, b):
        ab = iou(a, b)
        assert ab == iou(b, a)
        assert 0.0 <= ab <= 1.0 + 1e-12

    @given(a=boxes)
    def test_self_iou_is_one(self, a):
        assert iou(a, a) == pytest.approx(1.0, abs=1e-12)


class TestDecode:
    def test_zero_offsets_identity(self):
        priors = [PriorBox(0.3, 0.6, 0.2, 0.25), PriorBox(0.7, 0.4, 0.1, 0.1)]
        dets = decode_detections([[0.0] * 7] * 2, [[0.0] * 4] * 2, priors)
        for det, prior in zip(dets, priors):
            assert det.box.cx == pytest.approx(prior.cx, abs=1e-9)
            assert det.box.cy == pytest.approx(prior.cy, abs=1e-9)
            assert det.box.w == pytest.approx(prior.w, abs=1e-9)
            assert det.box.h == pytest.approx(prior.h, abs=1e-9)

    def test_uniform_logits_give_uniform_distribution(self):
        dets = decode_detections([[2.5] * 7], [[0.0] * 4], [PriorBox(0.5, 0.5, 0.2, 0.2)])
        assert dets[0].confidence == pytest.approx(1.0 / 7.0, abs=1e-12)
        for p in dets[0].scores.probs:
            assert p == pytest.approx(1.0 / 7.0, abs=1e-12)

    def test_log2_width_offset_doubles_width(self):
        prior = PriorBox(0.5, 0.5, 0.2, 0.3, v_center=0.1, v_size=1.0)
        dets = decode_detections([[0.0] * 7], [[0.0, 0.0, math.log(2.0), 0.0]], [prior])
        box = dets[0].box
        assert box.w == pytest.approx(0.4, abs=1e-12)
        assert box.cx == pytest.approx(0.5, abs=1e-12)
        assert box.cy == pytest.approx(0.5, abs=1e-12)
        assert box.h == pytest.approx(0.3, abs=1e-12)

    def test_center_offset_formula(self):
        prior = PriorBox(0.5, 0.5, 0.2, 0.4, v_center=0.1, v_size=0.2)
        dets = decode_detections([[0.0] * 7], [[1.0, -2.0, 0.0, 0.0]], [prior])
        assert dets[0].box.cx == pytest.approx(0.5 + 1.0 * 0.1 * 0.2, abs=1e-12)
        assert dets[0].box.cy == pytest.approx(0.5 - 2.0 * 0.1 * 0.4, abs=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ShapeMismatchError):
            decode_detections([[0.0] * 7], [], [PriorBox(0.5, 0.5, 0.2, 0.2)])
        with pytest.raises(ShapeMismatchError):
            decode_detections([[0.0] * 6], [[0.0] * 4], [PriorBox(0.5, 0.5, 0.2, 0.2)])

    @given(logits=st.lists(st.floats(-8, 8), min_size=7, max_size=7))
    def test_decoded_scores_are_normalized(self, logits):
        dets = decode_detections([logits], [[0.0] * 4], [PriorBox(0.5, 0.5, 0.2, 0.2)])
        det = dets[0]
        assert sum(det.scores.probs) == pytest.approx(1.0, abs=1e-6)
        assert det.confidence == max(det.scores.probs)


class TestNms:
    def test_single_detection_kept(self):
        det = Detection(BoundingBox(0.5, 0.5, 0.2, 0.2), EmotionDistribution.one_hot("happy"))
        assert nms([det], 0.5, 0.45) == [det]

    def test_coincident_boxes_keep_stronger(self):
        box = BoundingBox(0.5, 0.5, 0.2, 0.2)
        strong = Detection(box, EmotionDistribution.from_values([9, 1, 1, 1, 1, 1, 1]))
        weak = Detection(box, EmotionDistribution.from_values([4, 1, 1, 1, 1, 1, 1]))
        kept = nms([weak, strong], conf_threshold=0.3, iou_threshold=0.5)
        assert kept == [strong]

    def test_below_confidence_removed(self):
        det = Detection(BoundingBox(0.5, 0.5, 0.2, 0.2), EmotionDistribution.uniform())
        assert nms([det], conf_threshold=0.5, iou_threshold=0.45) == []

    def test_empty_input(self):
        assert nms([], 0.5, 0.45) == []

    def test_bad_threshold_rejected(self):
        with pytest.raises(ValueError):
            nms([], conf_threshold=1.5, iou_threshold=0.45)

    def test_matches_oracle_on_random_instances(self):
        rng = random.Random(20240511)
        for _ in range(50):
            dets = [random_detection(rng) for _ in range(rng.randint(0, 20))]
            conf_t = rng.choice([0.0, 0.15, 0.2, 0.3])
            iou_t = rng.choice([0.2, 0.45, 0.6, 0.9])
            assert nms(dets, conf_t, iou_t) == greedy_nms_oracle(dets, conf_t, iou_t)

    def test_no_kept_pair_overlaps_beyond_threshold(self):
        rng = random.Random(7)
        for _ in range(50):
            dets = [random_detection(rng) for _ in range(12)]
            kept = nms(dets, 0.1, 0.45)
            for i, a in enumerate(kept):
                for b in kept[i + 1 :]:
                    assert iou(a.box, b.box) <= 0.45


class TestLosses:
    def test_weighted_sum_example(self):
        assert multitask_loss(2.0, 1.0, LossWeights(alpha=1.0, beta=0.5)) == 2.5

    def test_zero_case(self):
        assert multitask_loss(0.0, 0.0, LossWeights(alpha=3.0, beta=2.0)) == 0.0

    def test_negative_inputs_rejected(self):
        with pytest.raises(ValueError):
            multitask_loss(-1.0, 0.0)
        with pytest.raises(ValueError):
            multitask_loss(0.0, -0.5)
        with pytest.raises(ValueError):
            LossWeights(alpha=-1.0)

    @given(c=st.floats(0, 100), r=st.floats(0, 100))
    def test_matches_direct_formula(self, c, r):
        w = LossWeights(alpha=1.0, beta=0.5)
        assert multitask_loss(c, r, w) == pytest.approx(1.0 * c + 0.5 * r, abs=1e-12)

    @given(c=st.floats(0, 50), r=st.floats(0, 50))
    def test_linearity_in_classification_term(self, c, r):
        w = LossWeights(alpha=1.0, beta=0.5)
        assert multitask_loss(2 * c, r, w) - multitask_loss(c, r, w) == pytest.approx(
            w.alpha * c, abs=1e-9
        )

    def test_classification_loss_is_neg_log_softmax(self):
        logits = [2.0, 0.5, -1.0, 0.0, 0.0, 0.0, 0.0]
        probs = softmax(logits)
        assert classification_loss(logits, 0) == pytest.approx(-math.log(probs[0]), abs=1e-12)

    def test_regression_loss_smooth_l1_regimes(self):
        # |d| < 1 -> quadratic; |d| >= 1 -> linear minus 0.5.
        assert regression_loss([0.5, 0.0, 0.0, 0.0], [0.0] * 4) == pytest.approx(0.125)
        assert regression_loss([2.0, 0.0, 0.0, 0.0], [0.0] * 4) == pytest.approx(1.5)


class TestClassifyFrame:
    def test_happy_passthrough(self, backbone_fixture):
        backbone = MockBackbone(backbone_fixture)
        dets = classify_frame("happy_face", backbone)
        assert len(dets) == 1
        assert dets[0].label == "happy"
        assert dets[0].confidence > 0.9

    def test_nothing_above_threshold(self, backbone_fixture):
        backbone = MockBackbone(backbone_fixture)
        assert classify_frame("nothing", backbone) == []

    def test_crowd_matches_oracle(self, backbone_fixture):
        backbone = MockBackbone(backbone_fixture)
        raw = backbone.infer("crowd")
        decoded = decode_detections(raw.class_scores, raw.offsets, raw.priors)
        expected = greedy_nms_oracle(decoded, 0.5, 0.45)
        assert classify_frame("crowd", backbone) == expected
        assert 1 <= len(expected) < 5

    def test_unknown_frame_is_perception_unavailable(self, backbone_fixture):
        backbone = MockBackbone(backbone_fixture)
        with pytest.raises(PerceptionUnavailableError):
            classify_frame("no_such_frame", backbone)

"""Facial-emotion detection post-processing for a single-shot detector head.

Raw backbone outputs (per-prior class logits and box offsets) are decoded
against prior boxes, duplicate detections are suppressed, and the multi-task
training loss is exposed so the weighting of its two terms is testable in
isolation. The backbone itself lives behind a port: all functions here are
pure over their inputs.
"""

from __future__ import annotations

import importlib
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Protocol

from .emotions import EMOTIONS, EmotionDistribution

DEFAULT_CONF_THRESHOLD = 0.5
DEFAULT_IOU_THRESHOLD = 0.45
DEFAULT_VARIANCES = (0.1, 0.2)


class ShapeMismatchError(ValueError):
    """Backbone output lists disagree in length or width."""


class PerceptionUnavailableError(RuntimeError):
    """The vision backbone could not produce outputs for a frame."""


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in normalized center-size form."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if self.w <= 0.0 or self.h <= 0.0:
            raise ValueError(f"degenerate box: w={self.w}, h={self.h}")

    def corners(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max)."""
        return (
            self.cx - self.w / 2.0,
            self.cy - self.h / 2.0,
            self.cx + self.w / 2.0,
            self.cy + self.h / 2.0,
        )

    @property
    def area(self) -> float:
        return self.w * self.h

    @classmethod
    def from_corners(cls, x0: float, y0: float, x1: float, y1: float) -> "BoundingBox":
        return cls((x0 + x1) / 2.0, (y0 + y1) / 2.0, x1 - x0, y1 - y0)


@dataclass(frozen=True)
class PriorBox(BoundingBox):
    """Reference box the detector regresses offsets against."""

    v_center: float = DEFAULT_VARIANCES[0]
    v_size: float = DEFAULT_VARIANCES[1]

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.v_center <= 0.0 or self.v_size <= 0.0:
            raise ValueError(f"variances must be positive: ({self.v_center}, {self.v_size})")


@dataclass(frozen=True)
class Detection:
    """A decoded face candidate with its per-emotion score vector."""

    box: BoundingBox
    scores: EmotionDistribution
    confidence: float = field(default=-1.0)

    def __post_init__(self) -> None:
        if self.confidence < 0.0:
            object.__setattr__(self, "confidence", self.scores.confidence)
        elif abs(self.confidence - self.scores.confidence) > 1e-9:
            raise ValueError("confidence must equal max(scores)")

    @property
    def label(self) -> str:
        return self.scores.label


@dataclass(frozen=True)
class LossWeights:
    """Weighting coefficients of the detector's two loss terms."""

    alpha: float = 1.0
    beta: float = 0.5

    def __post_init__(self) -> None:
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError(f"loss weights must be nonnegative: ({self.alpha}, {self.beta})")


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes; 0 when disjoint."""
    ax0, ay0, ax1, ay1 = a.corners()
    bx0, by0, bx1, by1 = b.corners()
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    return inter / union


def softmax(logits: Sequence[float]) -> tuple[float, ...]:
    m = max(logits)
    exps = [math.exp(x - m) for x in logits]
    total = sum(exps)
    return tuple(e / total for e in exps)


def decode_detections(
    class_scores: Sequence[Sequence[float]],
    offsets: Sequence[Sequence[float]],
    priors: Sequence[PriorBox],
) -> list[Detection]:
    """Decode per-prior logits and offsets into scored detections.

    Offsets follow the center-size convention: the center shifts by
    ``d * v_center * size`` and the size scales by ``exp(d * v_size)``.
    """
    if not (len(class_scores) == len(offsets) == len(priors)):
        raise ShapeMismatchError(
            f"got {len(class_scores)} score rows, {len(offsets)} offset rows, "
            f"{len(priors)} priors"
        )
    detections: list[Detection] = []
    for logits, off, prior in zip(class_scores, offsets, priors):
        if len(logits) != len(EMOTIONS):
            raise ShapeMismatchError(f"expected {len(EMOTIONS)} logits per prior, got {len(logits)}")
        if len(off) != 4:
            raise ShapeMismatchError(f"expected 4 offsets per prior, got {len(off)}")
        dx, dy, dw, dh = off
        box = BoundingBox(
            cx=prior.cx + dx * prior.v_center * prior.w,
            cy=prior.cy + dy * prior.v_center * prior.h,
            w=prior.w * math.exp(dw * prior.v_size),
            h=prior.h * math.exp(dh * prior.v_size),
        )
        detections.append(Detection(box=box, scores=EmotionDistribution(softmax(logits))))
    return detections


def _nms_order_key(d: Detection) -> tuple[float, float, float, float, float]:
    # Descending confidence, then box fields in canonical order for ties.
    return (-d.confidence, d.box.cx, d.box.cy, d.box.w, d.box.h)


def nms(
    dets: Sequence[Detection],
    conf_threshold: float = DEFAULT_CONF_THRESHOLD,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> list[Detection]:
    """Greedy non-maximum suppression with a deterministic ordering.

    Detections below ``conf_threshold`` are dropped up front; survivors are
    visited by descending confidence and suppressed when their overlap with
    an already-kept detection exceeds ``iou_threshold``.
    """
    if not 0.0 <= conf_threshold <= 1.0 or not 0.0 <= iou_threshold <= 1.0:
        raise ValueError("thresholds must lie in [0, 1]")
    candidates = sorted((d for d in dets if d.confidence >= conf_threshold), key=_nms_order_key)
    kept: list[Detection] = []
    for det in candidates:
        if all(iou(det.box, k.box) <= iou_threshold for k in kept):
            kept.append(det)
    return kept


def classification_loss(logits: Sequence[float], target: int) -> float:
    """Softmax cross-entropy of one prediction against a class index."""
    if not 0 <= target < len(logits):
        raise ValueError(f"target {target} out of range for {len(logits)} classes")
    probs = softmax(logits)
    return -math.log(probs[target])


def regression_loss(pred: Sequence[float], target: Sequence[float]) -> float:
    """Smooth-L1 loss summed over encoded offset coordinates."""
    if len(pred) != len(target):
        raise ShapeMismatchError(f"offset lengths differ: {len(pred)} vs {len(target)}")
    total = 0.0
    for p, t in zip(pred, target):
        d = abs(p - t)
        total += 0.5 * d * d if d < 1.0 else d - 0.5
    return total


def multitask_loss(cls_loss: float, reg_loss: float, w: LossWeights = LossWeights()) -> float:
    """Weighted sum ``alpha * cls_loss + beta * reg_loss``."""
    if cls_loss < 0.0 or reg_loss < 0.0:
        raise ValueError(f"loss terms must be nonnegative: ({cls_loss}, {reg_loss})")
    return w.alpha * cls_loss + w.beta * reg_loss


@dataclass(frozen=True)
class BackboneOutput:
    """Raw head outputs for one frame."""

    class_scores: tuple[tuple[float, ...], ...]
    offsets: tuple[tuple[float, ...], ...]
    priors: tuple[PriorBox, ...]


class VisionBackbone(Protocol):
    def infer(self, frame: object) -> BackboneOutput:
        """Run the detector heads on an image handle."""
        ...


def classify_frame(
    frame: object,
    backbone: VisionBackbone,
    conf_threshold: float = DEFAULT_CONF_THRESHOLD,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> list[Detection]:
    """Full per-frame path: backbone heads -> decode -> suppression."""
    try:
        raw = backbone.infer(frame)
    except Exception as exc:
        raise PerceptionUnavailableError(f"vision backbone failed: {exc}") from exc
    decoded = decode_detections(raw.class_scores, raw.offsets, raw.priors)
    return nms(decoded, conf_threshold, iou_threshold)


def uniform_prior_grid(
    rows: int,
    cols: int,
    scale: float = 0.2,
    variances: tuple[float, float] = DEFAULT_VARIANCES,
) -> list[PriorBox]:
    """Small fixed grid of square priors, one per cell center.

    Prior layout is an adapter concern; this grid is what the mock backbone
    fixtures are built against.
    """
    priors = []
    for r in range(rows):
        for c in range(cols):
            priors.append(
                PriorBox(
                    cx=(c + 0.5) / cols,
                    cy=(r + 0.5) / rows,
                    w=scale,
                    h=scale,
                    v_center=variances[0],
                    v_size=variances[1],
                )
            )
    return priors


class MockBackbone:
    """Scripted backbone replaying head outputs from a JSON fixture.

    Fixture schema::

        {"<frame_ref>": {"class_scores": [[7 floats]...],
                         "offsets": [[4 floats]...],
                         "priors": [[cx, cy, w, h, v_center, v_size]...]},
         ...}

    Unknown frame refs raise, which ``classify_frame`` surfaces as a
    perception-unavailable error (the caller then falls back to text-only
    emotion evidence).
    """

    def __init__(self, fixture: dict[str, dict]):
        self._fixture = fixture

    @classmethod
    def from_file(cls, path: str) -> "MockBackbone":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def infer(self, frame: object) -> BackboneOutput:
        entry = self._fixture[str(frame)]
        return BackboneOutput(
            class_scores=tuple(tuple(float(x) for x in row) for row in entry["class_scores"]),
            offsets=tuple(tuple(float(x) for x in row) for row in entry["offsets"]),
            priors=tuple(PriorBox(*row) for row in entry["priors"]),
        )


class ModelFileBackbone:
    """Adapter that defers to a runtime named only in configuration.

    The runtime module must expose ``load(path)`` returning an object with
    an ``infer(frame) -> BackboneOutput``-shaped method. Import or load
    failures surface as perception-unavailable at first use.
    """

    def __init__(self, model_path: str, runtime: str):
        self._model_path = model_path
        self._runtime = runtime
        self._impl = None

    def infer(self, frame: object) -> BackboneOutput:
        if self._impl is None:
            module = importlib.import_module(self._runtime)
            self._impl = module.load(self._model_path)
        return self._impl.infer(frame)

"""Independent reference implementations the unit and acceptance tests check against."""

from __future__ import annotations

import heapq
import math
from collections import Counter

from affectchat.planner import ActionCommand
from affectchat.vision import Detection


def corner_iou(a, b) -> float:
    """Overlap ratio recomputed from corner coordinates (same arithmetic order
    as production so exact-output comparisons stay meaningful)."""
    ax0, ay0, ax1, ay1 = a.corners()
    bx0, by0, bx1, by1 = b.corners()
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def greedy_nms_oracle(
    dets: list[Detection], conf_threshold: float, iou_threshold: float
) -> list[Detection]:
    """Exhaustive pop-the-maximum greedy suppression.

    Implements the same documented ordering contract (confidence descending,
    ties by canonical box fields ascending) with a different algorithm shape:
    repeatedly extract the best remaining candidate and prune its overlaps.
    """
    pool = [d for d in dets if d.confidence >= conf_threshold]
    kept: list[Detection] = []
    while pool:
        best = min(pool, key=lambda d: (-d.confidence, d.box.cx, d.box.cy, d.box.w, d.box.h))
        pool.remove(best)
        kept.append(best)
        pool = [d for d in pool if corner_iou(best.box, d.box) <= iou_threshold]
    return kept


def event_queue_emissions(
    commands: list[ActionCommand], sequence_start_ms: float, tick_times: list[float]
) -> list[list[ActionCommand]]:
    """Reference scheduler: a heap of (due time, plan index) drained per tick."""
    heap = [(sequence_start_ms + c.start_offset_ms, i) for i, c in enumerate(commands)]
    heapq.heapify(heap)
    emissions: list[list[ActionCommand]] = []
    for now in tick_times:
        batch = []
        while heap and heap[0][0] <= now:
            _, idx = heapq.heappop(heap)
            batch.append(commands[idx])
        emissions.append(batch)
    return emissions


def trigram_log_prob_sum(train_texts: list[str], score_texts: list[str]) -> tuple[float, int]:
    """Brute-force add-one trigram log-probability total, from raw counts.

    Reproduces the documented model contract (two begin markers, scored end
    marker, unknowns mapped to a marker, V = train vocab + 2) with plain
    dictionary counting, independent of the production class.
    """
    import re

    def toks(text: str) -> list[str]:
        return re.findall(r"\w+", text.lower())

    vocab = set()
    tri: Counter = Counter()
    bi: Counter = Counter()
    for text in train_texts:
        tokens = toks(text)
        vocab.update(tokens)
        seq = ["<s>", "<s>", *tokens, "</s>"]
        for i in range(2, len(seq)):
            bi[(seq[i - 2], seq[i - 1])] += 1
            tri[(seq[i - 2], seq[i - 1], seq[i])] += 1
    v_size = len(vocab) + 2

    def norm(token: str) -> str:
        if token in ("<s>", "</s>") or token in vocab:
            return token
        return "<unk>"

    total = 0.0
    count = 0
    for text in score_texts:
        seq = ["<s>", "<s>", *toks(text), "</s>"]
        for i in range(2, len(seq)):
            context = (norm(seq[i - 2]), norm(seq[i - 1]))
            token = norm(seq[i])
            total += math.log((tri.get((*context, token), 0) + 1) / (bi.get(context, 0) + v_size))
            count += 1
    return total, count

"""Emotion-conditioned planning of non-verbal action sequences.

Each fused emotion state maps to an ordered, timed sequence of abstract
action commands (facial expressions and gestures) drawn from a configured
action table. New speech resets the plan: whatever was pending is discarded
and a fresh sequence for the new label starts. Commands are hardware-agnostic
ids; a sink port receives whatever falls due on a tick.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Protocol

from .emotions import EMOTIONS, is_emotion

if TYPE_CHECKING:  # pragma: no cover
    from .fusion import FusedEmotionState

ACTION_KINDS = ("expression", "gesture")


class ActionTableError(ValueError):
    """The action table file violates its schema; raised at load time."""


@dataclass(frozen=True)
class ActionCommand:
    """One abstract non-verbal command, timed relative to sequence start."""

    kind: str
    action_id: str
    duration_ms: int
    start_offset_ms: int

    def __post_init__(self) -> None:
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"unknown action kind: {self.kind!r}")
        if self.duration_ms <= 0:
            raise ValueError(f"duration must be positive, got {self.duration_ms}")
        if self.start_offset_ms < 0:
            raise ValueError(f"start offset must be nonnegative, got {self.start_offset_ms}")


@dataclass(frozen=True)
class ActionTable:
    """Emotion label -> ordered command templates, all seven labels mapped."""

    sequences: dict[str, tuple[ActionCommand, ...]]

    def __post_init__(self) -> None:
        missing = [label for label in EMOTIONS if label not in self.sequences]
        if missing:
            raise ActionTableError(f"action table missing labels: {missing}")
        unknown = [label for label in self.sequences if not is_emotion(label)]
        if unknown:
            raise ActionTableError(f"action table has unknown labels: {unknown}")
        seen: set[tuple[str, str]] = set()
        for commands in self.sequences.values():
            for cmd in commands:
                key = (cmd.kind, cmd.action_id)
                if key in seen:
                    raise ActionTableError(f"duplicate {cmd.kind} id: {cmd.action_id!r}")
                seen.add(key)

    def sequence_for(self, label: str) -> tuple[ActionCommand, ...]:
        return self.sequences[label]


def load_action_table(path: str) -> ActionTable:
    """Load and validate the JSON action table; fails fast on schema errors."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ActionTableError("action table root must be an object")
    sequences: dict[str, tuple[ActionCommand, ...]] = {}
    for label, entries in raw.items():
        try:
            sequences[label] = tuple(
                ActionCommand(
                    kind=entry["kind"],
                    action_id=entry["action_id"],
                    duration_ms=int(entry["duration_ms"]),
                    start_offset_ms=int(entry["start_offset_ms"]),
                )
                for entry in entries
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ActionTableError(f"bad entry under {label!r}: {exc}") from exc
    return ActionTable(sequences=sequences)


@dataclass(frozen=True)
class PlannerState:
    """Pending sequence for one session; empty iff no active label."""

    active_label: str | None = None
    pending: tuple[ActionCommand, ...] = ()
    sequence_start_ms: float = 0.0
    utterance_id: str | None = None

    def __post_init__(self) -> None:
        if (self.active_label is None) != (len(self.pending) == 0):
            raise ValueError("sequence must be empty exactly when no label is active")


def plan_actions(e: "FusedEmotionState", table: ActionTable) -> list[ActionCommand]:
    """The table's sequence for the fused label, resolved to emission order."""
    return sorted(table.sequence_for(e.label), key=lambda c: c.start_offset_ms)


def reset(
    state: PlannerState,
    e: "FusedEmotionState",
    table: ActionTable,
    now_ms: float,
    utterance_id: str,
) -> PlannerState:
    """Discard pending commands and start a fresh sequence for ``e``.

    A repeated reset carrying the utterance id already recorded is a no-op,
    so back-to-back triggers within one utterance cannot double-schedule.
    """
    if utterance_id is not None and state.utterance_id == utterance_id:
        return state
    pending = tuple(plan_actions(e, table))
    return PlannerState(
        active_label=e.label if pending else None,
        pending=pending,
        sequence_start_ms=now_ms,
        utterance_id=utterance_id,
    )


def tick(state: PlannerState, now_ms: float) -> tuple[list[ActionCommand], PlannerState]:
    """Emit every pending command whose start offset has elapsed.

    Emission is at-most-once: emitted commands leave the pending set. When
    the sequence drains, the state returns to idle (no active label).
    """
    due: list[ActionCommand] = []
    remaining: list[ActionCommand] = []
    for c in state.pending:
        if state.sequence_start_ms + c.start_offset_ms <= now_ms:
            due.append(c)
        else:
            remaining.append(c)
    if not due:
        return [], state
    new_state = PlannerState(
        active_label=state.active_label if remaining else None,
        pending=tuple(remaining),
        sequence_start_ms=state.sequence_start_ms,
        utterance_id=state.utterance_id,
    )
    return due, new_state


class ActionSink(Protocol):
    def deliver(self, command: ActionCommand, at_ms: float) -> None:
        """Receive one emitted command; delivery order follows emission order."""
        ...


class RecordingSink:
    """Mock sink that records emitted commands with their timestamps."""

    def __init__(self) -> None:
        self.delivered: list[tuple[ActionCommand, float]] = []

    def deliver(self, command: ActionCommand, at_ms: float) -> None:
        self.delivered.append((command, at_ms))

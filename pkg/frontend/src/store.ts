// Console state reducer: a pure view over the service event stream.
//
// All emotion and latency numbers arrive computed from the server; the store
// only orders, windows, and dedupes them (by monotonically increasing event
// id, which also makes stream reconnects replay-safe).

import {
  ActionLogEntry,
  AvatarState,
  Bubble,
  ConsoleEvent,
  EmotionSample,
  LatencyRow,
  isEmotionLabel,
} from "./types.js";

export const TELEMETRY_WINDOW = 50;

export interface ConsoleState {
  lastEventId: number;
  avatar: AvatarState;
  bubbles: Bubble[];
  eventWindow: ConsoleEvent[];
  latencyRows: LatencyRow[];
  emotionTimeline: EmotionSample[];
  actionLog: ActionLogEntry[];
}

export function initialState(): ConsoleState {
  return {
    lastEventId: 0,
    avatar: { expression: "neutral", changedAtEventId: 0 },
    bubbles: [],
    eventWindow: [],
    latencyRows: [],
    emotionTimeline: [],
    actionLog: [],
  };
}

export function addUserBubble(state: ConsoleState, text: string, utteranceId?: string): ConsoleState {
  return { ...state, bubbles: [...state.bubbles, { role: "user", text, degraded: false, utteranceId }] };
}

export function addFailureBubble(state: ConsoleState, text: string): ConsoleState {
  return { ...state, bubbles: [...state.bubbles, { role: "failure", text, degraded: true }] };
}

function isConsoleEvent(raw: unknown): raw is ConsoleEvent {
  if (typeof raw !== "object" || raw === null) return false;
  const candidate = raw as { id?: unknown; kind?: unknown };
  return (
    typeof candidate.id === "number" &&
    (candidate.kind === "emotion_update" ||
      candidate.kind === "action_emitted" ||
      candidate.kind === "response" ||
      candidate.kind === "latency_report")
  );
}

function windowed<T>(items: T[], added: T): T[] {
  const next = [...items, added];
  return next.length > TELEMETRY_WINDOW ? next.slice(next.length - TELEMETRY_WINDOW) : next;
}

/** Apply one raw stream payload; duplicates and unknown kinds are no-ops. */
export function applyEvent(state: ConsoleState, raw: unknown): ConsoleState {
  if (!isConsoleEvent(raw)) return state;
  if (raw.id <= state.lastEventId) return state;

  let next: ConsoleState = { ...state, lastEventId: raw.id, eventWindow: windowed(state.eventWindow, raw) };

  switch (raw.kind) {
    case "emotion_update": {
      if (isEmotionLabel(raw.label)) {
        next = {
          ...next,
          avatar: { expression: raw.label, changedAtEventId: raw.id },
          emotionTimeline: windowed(next.emotionTimeline, { label: raw.label, eventId: raw.id }),
        };
      }
      break;
    }
    case "action_emitted": {
      next = {
        ...next,
        actionLog: windowed(next.actionLog, {
          actionKind: raw.action_kind,
          actionId: raw.action_id,
          eventId: raw.id,
        }),
      };
      if (raw.action_kind === "expression") {
        // Expression actions re-trigger the cross-fade of the current face.
        next = { ...next, avatar: { ...next.avatar, changedAtEventId: raw.id } };
      }
      break;
    }
    case "response": {
      next = {
        ...next,
        bubbles: [
          ...next.bubbles,
          {
            role: "robot",
            text: raw.text,
            degraded: Boolean(raw.degraded || raw.reprompt),
            utteranceId: raw.utterance_id,
          },
        ],
      };
      break;
    }
    case "latency_report": {
      const row: LatencyRow = {
        utteranceId: raw.utterance_id,
        stages: [
          { name: "asr", ms: raw.asr_ms },
          { name: "emotion", ms: raw.emotion_ms },
          { name: "compose", ms: raw.compose_ms },
          { name: "llm", ms: raw.llm_ms },
          { name: "tts", ms: raw.tts_ms },
        ],
        totalMs: raw.total_ms,
        overlapSavedMs: raw.overlap_saved_ms,
      };
      next = { ...next, latencyRows: windowed(next.latencyRows, row) };
      break;
    }
  }
  return next;
}

export function robotBubbleCount(state: ConsoleState): number {
  return state.bubbles.filter((b) => b.role === "robot").length;
}

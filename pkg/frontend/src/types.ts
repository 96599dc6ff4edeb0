// Shared types mirroring the service API and event stream wire formats.

export const EMOTIONS = [
  "happy",
  "sad",
  "angry",
  "confused",
  "fearful",
  "disgusted",
  "neutral",
] as const;

export type EmotionLabel = (typeof EMOTIONS)[number];

export function isEmotionLabel(value: unknown): value is EmotionLabel {
  return typeof value === "string" && (EMOTIONS as readonly string[]).includes(value);
}

export interface EmotionUpdateEvent {
  id: number;
  kind: "emotion_update";
  label: EmotionLabel;
  distribution: Record<string, number>;
  visual_weight: number;
  text_weight: number;
  utterance_id?: string;
}

export interface ActionEmittedEvent {
  id: number;
  kind: "action_emitted";
  action_kind: "expression" | "gesture";
  action_id: string;
  at_ms: number;
}

export interface ResponseEvent {
  id: number;
  kind: "response";
  text: string;
  degraded: boolean;
  reprompt?: boolean;
  utterance_id?: string;
}

export interface LatencyReportEvent {
  id: number;
  kind: "latency_report";
  asr_ms: number;
  emotion_ms: number;
  compose_ms: number;
  llm_ms: number;
  tts_ms: number;
  total_ms: number;
  overlap_saved_ms: number;
  utterance_id?: string;
}

export type ConsoleEvent =
  | EmotionUpdateEvent
  | ActionEmittedEvent
  | ResponseEvent
  | LatencyReportEvent;

export interface AvatarState {
  expression: EmotionLabel;
  changedAtEventId: number;
}

export interface Bubble {
  role: "user" | "robot" | "failure";
  text: string;
  degraded: boolean;
  utteranceId?: string;
}

export interface LatencyRow {
  utteranceId?: string;
  stages: { name: string; ms: number }[];
  totalMs: number;
  overlapSavedMs: number;
}

export interface EmotionSample {
  label: EmotionLabel;
  eventId: number;
}

export interface ActionLogEntry {
  actionKind: string;
  actionId: string;
  eventId: number;
}

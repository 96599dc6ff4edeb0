// Telemetry panel rendering: latency bars, fused-emotion timeline, action log.

import { ConsoleState } from "./store.js";
import { LatencyRow } from "./types.js";

const STAGE_COLORS: Record<string, string> = {
  asr: "#6f9ceb",
  emotion: "#f5c542",
  compose: "#b98ad4",
  llm: "#e5604c",
  tts: "#8fd0c6",
};

function latencyRowHtml(row: LatencyRow): string {
  const scale = Math.max(row.totalMs, row.stages.reduce((sum, s) => sum + s.ms, 0), 1);
  const bars = row.stages
    .map((stage) => {
      const width = Math.max((stage.ms / scale) * 100, stage.ms > 0 ? 1 : 0);
      return `<span class="bar" style="width:${width.toFixed(1)}%;background:${STAGE_COLORS[stage.name]}" title="${stage.name}: ${stage.ms.toFixed(0)} ms"></span>`;
    })
    .join("");
  return `
<div class="latency-row">
  <div class="bars">${bars}</div>
  <div class="latency-caption">total ${row.totalMs.toFixed(0)} ms, saved ${row.overlapSavedMs.toFixed(0)} ms</div>
</div>`;
}

export function renderTelemetry(root: HTMLElement, state: ConsoleState): void {
  const latency = state.latencyRows.map(latencyRowHtml).join("");
  const timeline = state.emotionTimeline
    .map((s) => `<span class="emotion-chip" data-label="${s.label}">${s.label}</span>`)
    .join("");
  const actions = state.actionLog
    .map((a) => `<li><code>${a.actionKind}</code> ${a.actionId}</li>`)
    .join("");
  root.innerHTML = `
<h3>Latency per stage</h3>
<div class="latency-list">${latency || "<p class=\"muted\">no reports yet</p>"}</div>
<h3>Emotion timeline</h3>
<div class="emotion-timeline">${timeline || "<p class=\"muted\">no updates yet</p>"}</div>
<h3>Actions</h3>
<ul class="action-log">${actions || "<p class=\"muted\">none yet</p>"}</ul>`;
}

// Console wiring: profile wizard, chat view, avatar, telemetry, event stream.

import { ServiceClient } from "./api.js";
import { AvatarView } from "./avatar.js";
import { EventStreamController, eventSourceConnector } from "./events.js";
import { ConsoleState, addFailureBubble, addUserBubble, applyEvent, initialState } from "./store.js";
import { renderTelemetry } from "./telemetry.js";

const baseUrl = ""; // same origin; override via ?api=<url>
const apiOverride = new URLSearchParams(window.location.search).get("api");
const client = new ServiceClient(apiOverride ?? baseUrl);

let state: ConsoleState = initialState();
let sessionId: string | null = null;
let stream: EventStreamController | null = null;

const el = (id: string) => document.getElementById(id) as HTMLElement;

function renderBubbles(): void {
  const chat = el("chat-log");
  chat.innerHTML = state.bubbles
    .map((b) => {
      const flag = b.degraded && b.role !== "user" ? '<span class="flag">degraded</span>' : "";
      return `<div class="bubble ${b.role}">${escapeHtml(b.text)}${flag}</div>`;
    })
    .join("");
  chat.scrollTop = chat.scrollHeight;
}

function escapeHtml(text: string): string {
  const div = document.createElement("div");
  div.textContent = text;
  return div.innerHTML;
}

let avatarView: AvatarView;

function renderAll(): void {
  avatarView.render(state.avatar);
  renderBubbles();
  renderTelemetry(el("telemetry"), state);
}

function update(next: ConsoleState): void {
  if (next === state) return;
  state = next;
  renderAll();
}

function startStream(): void {
  if (!sessionId) return;
  stream?.stop();
  stream = new EventStreamController(
    eventSourceConnector(apiOverride ?? baseUrl, sessionId),
    (raw) => update(applyEvent(state, raw)),
    () => state.lastEventId,
  );
  stream.start();
}

function setupWizard(): void {
  const form = el("profile-form") as HTMLFormElement;
  const nameInput = el("profile-name") as HTMLInputElement;
  const traitsInput = el("profile-traits") as HTMLTextAreaElement;
  const submit = el("profile-submit") as HTMLButtonElement;
  const banner = el("profile-error");

  const refresh = () => {
    submit.disabled = nameInput.value.trim().length === 0;
  };
  nameInput.addEventListener("input", refresh);
  refresh();

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    banner.hidden = true;
    submit.disabled = true;
    try {
      const session = await client.createSession(nameInput.value.trim(), traitsInput.value.trim());
      sessionId = session.session_id;
      el("session-label").textContent = session.session_id;
      el("wizard").hidden = true;
      el("console").hidden = false;
      startStream();
    } catch (error) {
      banner.textContent = `Could not create the session (${String(error)}). Check the service and retry.`;
      banner.hidden = false; // form state is preserved for retry
    } finally {
      refresh();
    }
  });
}

function setupChat(): void {
  const form = el("chat-form") as HTMLFormElement;
  const input = el("chat-input") as HTMLInputElement;
  const frameInput = el("frame-ref") as HTMLInputElement;

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text || !sessionId) return;
    input.value = "";
    update(addUserBubble(state, text));
    try {
      await client.sendText(sessionId, text, frameInput.value.trim() || undefined);
      // The robot bubble arrives through the event stream.
    } catch (error) {
      update(addFailureBubble(state, `delivery failed: ${String(error)}`));
    }
  });

  const traceForm = el("trace-form") as HTMLFormElement;
  const traceInput = el("trace-ref") as HTMLInputElement;
  traceForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const ref = traceInput.value.trim();
    if (!ref || !sessionId) return;
    try {
      const exchanges = await client.replayTrace(sessionId, ref);
      let next = state;
      for (const exchange of exchanges) {
        next = addUserBubble(next, exchange.user_text, exchange.utterance_id);
      }
      update(next); // robot bubbles arrive through the event stream
    } catch (error) {
      update(addFailureBubble(state, `trace replay failed: ${String(error)}`));
    }
  });
}

document.addEventListener("DOMContentLoaded", () => {
  avatarView = new AvatarView(el("avatar"));
  renderAll();
  setupWizard();
  setupChat();
});

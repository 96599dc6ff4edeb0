// Event stream client with resume-on-reconnect.
//
// The transport is injectable so the reconnect/resume logic is testable
// without a browser EventSource; in the browser we connect with
// `?since=<last seen id>` and the store's id dedupe absorbs any overlap.

export interface StreamConnection {
  close(): void;
}

export type StreamConnector = (
  sinceId: number,
  onEvent: (raw: unknown) => void,
  onError: () => void,
) => StreamConnection;

export interface StreamControllerOptions {
  initialBackoffMs?: number;
  maxBackoffMs?: number;
  scheduler?: (fn: () => void, delayMs: number) => void;
}

export class EventStreamController {
  private connection: StreamConnection | null = null;
  private stopped = true;
  private backoffMs: number;
  private readonly initialBackoffMs: number;
  private readonly maxBackoffMs: number;
  private readonly schedule: (fn: () => void, delayMs: number) => void;
  connectCount = 0;

  constructor(
    private readonly connector: StreamConnector,
    private readonly onEvent: (raw: unknown) => void,
    private readonly lastSeenId: () => number,
    options: StreamControllerOptions = {},
  ) {
    this.initialBackoffMs = options.initialBackoffMs ?? 1000;
    this.maxBackoffMs = options.maxBackoffMs ?? 15000;
    this.backoffMs = this.initialBackoffMs;
    this.schedule = options.scheduler ?? ((fn, delay) => setTimeout(fn, delay));
  }

  start(): void {
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    this.connection?.close();
    this.connection = null;
  }

  private connect(): void {
    if (this.stopped) return;
    this.connectCount += 1;
    this.connection = this.connector(
      this.lastSeenId(),
      (raw) => {
        this.backoffMs = this.initialBackoffMs;
        this.onEvent(raw);
      },
      () => this.handleError(),
    );
  }

  private handleError(): void {
    this.connection?.close();
    this.connection = null;
    if (this.stopped) return;
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, this.maxBackoffMs);
    this.schedule(() => this.connect(), delay);
  }
}

/** Browser transport over EventSource; resumes from the given event id. */
export function eventSourceConnector(baseUrl: string, sessionId: string): StreamConnector {
  return (sinceId, onEvent, onError) => {
    const url = `${baseUrl}/sessions/${encodeURIComponent(sessionId)}/events?since=${sinceId}`;
    const source = new EventSource(url);
    const handle = (message: MessageEvent) => {
      try {
        onEvent(JSON.parse(message.data));
      } catch {
        // Malformed frames are dropped; the stream itself stays up.
      }
    };
    for (const kind of ["emotion_update", "action_emitted", "response", "latency_report"]) {
      source.addEventListener(kind, handle as EventListener);
    }
    source.onmessage = handle;
    source.onerror = () => onError();
    return { close: () => source.close() };
  };
}

// Thin HTTP client for the dialogue service.

export interface SessionInfo {
  session_id: string;
  user_id: string;
}

export interface ExchangeInfo {
  utterance_id: string;
  user_text: string;
  response_text: string;
  degraded: boolean;
  reprompt: boolean;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function postJson<T>(url: string, body: unknown): Promise<T> {
  const response = await fetch(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    throw new ApiError(response.status, `${url} failed with ${response.status}`);
  }
  return (await response.json()) as T;
}

export class ServiceClient {
  constructor(private readonly baseUrl: string = "") {}

  createSession(displayName: string, traits: string): Promise<SessionInfo> {
    return postJson<SessionInfo>(`${this.baseUrl}/sessions`, {
      display_name: displayName,
      traits,
    });
  }

  async sendText(sessionId: string, text: string, frameRef?: string): Promise<ExchangeInfo[]> {
    const body: Record<string, string> = { text };
    if (frameRef) body.frame_ref = frameRef;
    const result = await postJson<{ exchanges: ExchangeInfo[] }>(
      `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/utterance`,
      body,
    );
    return result.exchanges;
  }

  async replayTrace(sessionId: string, traceRef: string): Promise<ExchangeInfo[]> {
    const result = await postJson<{ exchanges: ExchangeInfo[] }>(
      `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/utterance`,
      { trace_ref: traceRef },
    );
    return result.exchanges;
  }
}

/**
 * Thin typed client for the annotation-service HTTP API. All mutations
 * go through these five endpoints; the client holds no business logic
 * (flip detection lives server-side).
 */

import type { AttemptResult, NextPayload } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  let body: unknown;
  try {
    body = await response.json();
  } catch {
    throw new ApiRequestError("bad_response", "response body was not JSON", response.status);
  }
  if (!response.ok) {
    const err = body as { code?: string; message?: string };
    throw new ApiRequestError(err.code ?? "error", err.message ?? "request failed", response.status);
  }
  return body as T;
}

export interface SessionOptions {
  dataset: string;
  adapter: string;
  level: "word" | "sentence";
  require_flip?: boolean;
  show_gold?: boolean;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, "") + path;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchImpl(this.url(path), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((response) => unwrap<T>(response));
  }

  async createSession(options: SessionOptions): Promise<string> {
    const payload = await this.post<{ session_id: string }>("/sessions", options);
    return payload.session_id;
  }

  next(sessionId: string): Promise<NextPayload> {
    return this.fetchImpl(this.url(`/sessions/${sessionId}/next`))
      .then((response) => unwrap<NextPayload>(response));
  }

  attempt(sessionId: string, itemId: string, question: string): Promise<AttemptResult> {
    return this.post<AttemptResult>(`/sessions/${sessionId}/attempt`, {
      item_id: itemId,
      question,
    });
  }

  accept(sessionId: string, itemId: string, question: string): Promise<{ accepted_count: number }> {
    return this.post<{ accepted: boolean; accepted_count: number }>(
      `/sessions/${sessionId}/accept`,
      { item_id: itemId, question },
    );
  }

  skip(sessionId: string, itemId: string): Promise<void> {
    return this.post<{ skipped: boolean }>(`/sessions/${sessionId}/skip`, {
      item_id: itemId,
    }).then(() => undefined);
  }

  /** Raw pair JSONL of everything accepted so far. */
  export(sessionId: string): Promise<string> {
    return this.fetchImpl(this.url(`/sessions/${sessionId}/export`)).then((response) => {
      if (!response.ok) {
        throw new ApiRequestError("error", `export failed with ${response.status}`, response.status);
      }
      return response.text();
    });
  }
}

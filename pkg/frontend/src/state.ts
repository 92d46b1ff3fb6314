/**
 * Session controller: a small state machine over the backend responses
 * plus the local draft text. Views render from this state alone, so a
 * re-fetch reproduces the UI exactly.
 */

import { ApiClient, ApiRequestError } from "./api.js";
import { isDone, type AttemptResult, type ItemPayload } from "./types.js";

export type Badge = "FLIPPED" | "UNCHANGED";

export function badgeFor(result: AttemptResult): Badge {
  return result.flipped ? "FLIPPED" : "UNCHANGED";
}

export interface AttemptEntry {
  text: string;
  result: AttemptResult;
  badge: Badge;
}

export type Phase = "loading" | "item" | "done" | "error";

export interface SessionState {
  phase: Phase;
  item: ItemPayload | null;
  attempts: AttemptEntry[];
  draft: string;
  notice: string | null;     // inline validation message
  banner: string | null;     // network failure banner (state preserved)
  busy: boolean;             // one in-flight mutation at a time
  acceptedCount: number;
}

export function initialState(): SessionState {
  return {
    phase: "loading",
    item: null,
    attempts: [],
    draft: "",
    notice: null,
    banner: null,
    busy: false,
    acceptedCount: 0,
  };
}

/** The accept button is live once an eligible attempt exists. */
export function acceptEligible(state: SessionState): boolean {
  if (!state.item || state.attempts.length === 0) return false;
  const last = state.attempts[state.attempts.length - 1];
  return state.item.require_flip ? last.result.flipped : true;
}

export type Listener = (state: SessionState) => void;

export class SessionController {
  private state: SessionState = initialState();
  private listeners: Listener[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
  ) {}

  getState(): SessionState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
    listener(this.state);
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  setDraft(text: string): void {
    this.update({ draft: text, notice: null });
  }

  /** Fetch and show the next unserved item (or the completion view). */
  async next(): Promise<void> {
    this.update({ phase: "loading", banner: null });
    try {
      const payload = await this.api.next(this.sessionId);
      if (isDone(payload)) {
        this.update({
          phase: "done",
          item: null,
          attempts: [],
          draft: "",
          acceptedCount: payload.accepted_count,
        });
        return;
      }
      this.update({
        phase: "item",
        item: payload,
        attempts: [],
        draft: "",
        notice: null,
        acceptedCount: payload.accepted_count,
      });
    } catch (error) {
      // keep item/attempt state; the banner offers a retry
      this.update({ phase: this.state.item ? "item" : "error", banner: describe(error) });
    }
  }

  /** Submit one perturbed question; records the attempt with its badge. */
  async attempt(): Promise<AttemptEntry | null> {
    const { item, draft } = this.state;
    if (!item || this.state.busy) return null;
    const text = draft.trim();
    if (!text) {
      this.update({ notice: "Type a perturbed question first." });
      return null;
    }
    if (normalize(text) === normalize(item.question)) {
      this.update({ notice: "The perturbed question must differ from the original." });
      return null;
    }
    this.update({ busy: true, notice: null, banner: null });
    try {
      const result = await this.api.attempt(this.sessionId, item.item_id, text);
      const entry: AttemptEntry = { text, result, badge: badgeFor(result) };
      this.update({ busy: false, attempts: [...this.state.attempts, entry] });
      return entry;
    } catch (error) {
      if (error instanceof ApiRequestError && error.code === "unchanged") {
        this.update({ busy: false, notice: error.message });
      } else {
        this.update({ busy: false, banner: describe(error) });
      }
      return null;
    }
  }

  /** Persist the latest eligible attempt and advance. */
  async accept(): Promise<boolean> {
    const { item } = this.state;
    if (!item || this.state.busy || !acceptEligible(this.state)) return false;
    const last = this.state.attempts[this.state.attempts.length - 1];
    this.update({ busy: true, banner: null });
    try {
      const payload = await this.api.accept(this.sessionId, item.item_id, last.text);
      this.update({ busy: false, acceptedCount: payload.accepted_count });
      await this.next();
      return true;
    } catch (error) {
      this.update({ busy: false, banner: describe(error) });
      return false;
    }
  }

  /** Advance without persisting anything. */
  async skip(): Promise<boolean> {
    const { item } = this.state;
    if (!item || this.state.busy) return false;
    this.update({ busy: true, banner: null });
    try {
      await this.api.skip(this.sessionId, item.item_id);
      this.update({ busy: false });
      await this.next();
      return true;
    } catch (error) {
      this.update({ busy: false, banner: describe(error) });
      return false;
    }
  }
}

function normalize(text: string): string {
  return text.toLowerCase().split(/\s+/).filter(Boolean).join(" ");
}

function describe(error: unknown): string {
  if (error instanceof ApiRequestError) return `${error.code}: ${error.message}`;
  if (error instanceof Error) return error.message;
  return String(error);
}

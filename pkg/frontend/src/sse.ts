/** Server-sent-events client over fetch streaming, with automatic
 * reconnection. Implemented on fetch rather than EventSource so reconnect
 * backoff is controllable and the client runs in both browsers and tests. */

import type { FetchLike } from "./api.js";

export interface StreamHandlers {
  onEvent: (event: string, data: string) => void;
  onConnection?: (state: "connected" | "reconnecting") => void;
}

export interface StreamOptions {
  baseDelayMs?: number;
  maxDelayMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const DEFAULT_BASE_DELAY_MS = 1000;
const MAX_DELAY_MS = 10_000; // backoff cap

function defaultSleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Incremental text/event-stream parser; feed() returns completed frames. */
export class SseParser {
  private buffer = "";

  feed(chunk: string): Array<{ event: string; data: string }> {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const frames: Array<{ event: string; data: string }> = [];
    let index: number;
    while ((index = this.buffer.indexOf("\n\n")) >= 0) {
      const block = this.buffer.slice(0, index);
      this.buffer = this.buffer.slice(index + 2);
      let event = "message";
      const data: string[] = [];
      for (const line of block.split("\n")) {
        if (line.startsWith(":")) continue; // heartbeat comment
        if (line.startsWith("event:")) event = line.slice(6).trim();
        else if (line.startsWith("data:")) data.push(line.slice(5).replace(/^ /, ""));
      }
      if (data.length > 0) frames.push({ event, data: data.join("\n") });
    }
    return frames;
  }
}

export class EventStream {
  private stopped = false;
  private delayMs: number;
  private readonly baseDelayMs: number;
  private readonly maxDelayMs: number;
  private readonly sleep: (ms: number) => Promise<void>;
  private runPromise: Promise<void> | null = null;

  constructor(
    private url: string,
    private handlers: StreamHandlers,
    private fetchImpl: FetchLike = (...args) => globalThis.fetch(...args),
    options: StreamOptions = {},
  ) {
    this.baseDelayMs = options.baseDelayMs ?? DEFAULT_BASE_DELAY_MS;
    this.maxDelayMs = options.maxDelayMs ?? MAX_DELAY_MS;
    this.sleep = options.sleep ?? defaultSleep;
    this.delayMs = this.baseDelayMs;
  }

  start(): void {
    if (this.runPromise) return;
    this.stopped = false;
    this.runPromise = this.run();
  }

  stop(): void {
    this.stopped = true;
  }

  /** Current reconnect delay; exposed for tests. */
  get currentDelayMs(): number {
    return this.delayMs;
  }

  private async run(): Promise<void> {
    while (!this.stopped) {
      try {
        const response = await this.fetchImpl(this.url, {
          headers: { accept: "text/event-stream" },
        });
        if (!response.ok || !response.body) throw new Error(`stream status ${response.status}`);
        this.handlers.onConnection?.("connected");
        this.delayMs = this.baseDelayMs; // healthy connection resets backoff
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        const parser = new SseParser();
        while (!this.stopped) {
          const { value, done } = await reader.read();
          if (done) break;
          for (const frame of parser.feed(decoder.decode(value, { stream: true }))) {
            this.handlers.onEvent(frame.event, frame.data);
          }
        }
        reader.cancel().catch(() => undefined);
      } catch (err) {
        if (this.stopped) break;
        console.warn("stream error:", err);
      }
      if (this.stopped) break;
      this.handlers.onConnection?.("reconnecting");
      await this.sleep(this.delayMs);
      this.delayMs = Math.min(this.delayMs * 2, this.maxDelayMs);
    }
    this.runPromise = null;
  }
}

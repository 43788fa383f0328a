/** Gateway client. The UI talks to these documented endpoints and nothing
 * else: /api/board, /api/command, /api/stream, /api/feedback, /api/profile,
 * /api/history. */

import type { Board, Profile } from "./types.js";
import { parseBoard } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (...args) => globalThis.fetch(...args),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async postCommand(token: string): Promise<{ status: string; published: string }> {
    const response = await this.fetchImpl(this.url("/api/command"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ command: token }),
    });
    if (!response.ok) throw new Error(`command failed: ${response.status}`);
    return response.json();
  }

  async postFeedback(messageId: string, helpful: boolean): Promise<void> {
    const response = await this.fetchImpl(this.url("/api/feedback"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ message_id: messageId, helpful }),
    });
    if (!response.ok) throw new Error(`feedback failed: ${response.status}`);
  }

  async fetchBoard(id: string): Promise<Board> {
    const response = await this.fetchImpl(this.url(`/api/board/${id}`));
    if (!response.ok) throw new Error(`board ${id} unavailable: ${response.status}`);
    return parseBoard(await response.json());
  }

  async fetchProfile(): Promise<Profile> {
    const response = await this.fetchImpl(this.url("/api/profile"));
    if (!response.ok) throw new Error(`profile unavailable: ${response.status}`);
    return (await response.json()).profile;
  }

  async patchProfile(patch: Partial<Profile>): Promise<Profile> {
    const response = await this.fetchImpl(this.url("/api/profile"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(patch),
    });
    if (!response.ok) throw new Error(`profile update rejected: ${response.status}`);
    return (await response.json()).profile;
  }

  async fetchHistory(limit: number): Promise<unknown[]> {
    const response = await this.fetchImpl(this.url(`/api/history?limit=${limit}`));
    if (!response.ok) throw new Error(`history unavailable: ${response.status}`);
    return (await response.json()).entries;
  }
}

/** Application shell: loads the active board, renders it, subscribes to the
 * explanation stream, and wires profile controls and feedback. */

import { ApiClient, FetchLike } from "./api.js";
import { renderBoard } from "./board.js";
import { Controls } from "./controls.js";
import { MessageList } from "./messages.js";
import { EventStream, StreamOptions } from "./sse.js";
import type { Board, Profile } from "./types.js";
import { parseMessage } from "./types.js";

export interface AppElements {
  board: HTMLElement;
  messages: HTMLElement;
  controls: HTMLElement;
  status: HTMLElement;
}

export class App {
  readonly api: ApiClient;
  readonly messageList: MessageList;
  readonly controls: Controls;
  stream: EventStream | null = null;
  profile: Profile | null = null;
  activeBoard: Board | null = null;
  private language = "en";

  constructor(
    private elements: AppElements,
    baseUrl = "",
    private fetchImpl: FetchLike = (...args) => globalThis.fetch(...args),
    private streamOptions: StreamOptions = {},
  ) {
    this.api = new ApiClient(baseUrl, fetchImpl);
    this.messageList = new MessageList(elements.messages, {
      onFeedback: (messageId, helpful) => this.api.postFeedback(messageId, helpful),
    });
    this.controls = new Controls(elements.controls, {
      onDetail: (detail) => void this.updateProfile({ detail }),
      onLanguage: (language) => void this.updateProfile({ language }),
    });
    this.baseUrl = baseUrl;
  }

  private baseUrl: string;

  async start(): Promise<void> {
    try {
      this.profile = await this.api.fetchProfile();
      this.language = this.profile.language;
      this.messageList.setLanguage(this.language);
      this.controls.reflect(this.profile);
    } catch (err) {
      console.warn("profile unavailable:", err);
    }
    await this.loadBoard("interaction");
    this.stream = new EventStream(
      `${this.baseUrl}/api/stream`,
      {
        onEvent: (event, data) => this.onStreamEvent(event, data),
        onConnection: (state) => this.controls.setConnection(state),
      },
      this.fetchImpl,
      this.streamOptions,
    );
    this.stream.start();
  }

  stop(): void {
    this.stream?.stop();
  }

  async loadBoard(id: string): Promise<void> {
    let raw: unknown;
    try {
      raw = await this.api.fetchBoard(id);
    } catch (err) {
      console.warn("board unavailable:", err);
      return;
    }
    this.activeBoard = renderBoard(this.elements.board, raw, this.language, {
      onPress: (token) => this.api.postCommand(token),
    });
  }

  private onStreamEvent(event: string, data: string): void {
    if (event === "explanation") {
      const message = parseMessage(data);
      if (message) this.messageList.add(message);
    } else if (event === "status") {
      this.renderStatus(data);
    } else if (event === "board") {
      try {
        const active = JSON.parse(data).active;
        if (typeof active === "string" && active !== this.activeBoard?.id) {
          void this.loadBoard(active);
        }
      } catch {
        console.warn("dropping malformed board event");
      }
    }
  }

  private renderStatus(data: string): void {
    try {
      const status = JSON.parse(data);
      const goal = status.goal ?? "none";
      const carried = status.carried ? `, carrying ${status.carried}` : "";
      this.elements.status.textContent =
        `tick ${status.tick} | position ${status.pose?.join(",")} | goal ${goal} | battery ${status.battery}%${carried}`;
    } catch {
      console.warn("dropping malformed status event");
    }
  }

  private async updateProfile(patch: Partial<Profile>): Promise<void> {
    try {
      this.profile = await this.api.patchProfile(patch);
      const changedLanguage = patch.language && patch.language !== this.language;
      this.language = this.profile.language;
      this.messageList.setLanguage(this.language);
      this.controls.reflect(this.profile);
      if (changedLanguage && this.activeBoard) {
        renderBoard(this.elements.board, this.activeBoard, this.language, {
          onPress: (token) => this.api.postCommand(token),
        });
      }
    } catch (err) {
      console.warn("profile update failed:", err);
    }
  }
}

export function mountApp(
  doc: Document,
  baseUrl = "",
  fetchImpl?: FetchLike,
  streamOptions?: StreamOptions,
): App {
  const elements: AppElements = {
    board: doc.getElementById("board")!,
    messages: doc.getElementById("messages")!,
    controls: doc.getElementById("controls")!,
    status: doc.getElementById("status")!,
  };
  return new App(elements, baseUrl, fetchImpl, streamOptions);
}

/** Profile controls (detail selector, language toggle) and the stream
 * connection indicator. */

import type { Profile } from "./types.js";

export interface ControlCallbacks {
  onDetail: (detail: string) => void;
  onLanguage: (language: string) => void;
}

const DETAILS = ["basic", "standard", "expert"];
const LANGUAGES = ["en", "es"];

export class Controls {
  private detailSelect!: HTMLSelectElement;
  private languageButtons = new Map<string, HTMLButtonElement>();
  private indicator!: HTMLElement;

  constructor(private container: HTMLElement, private callbacks: ControlCallbacks) {
    this.build();
  }

  private build(): void {
    const doc = this.container.ownerDocument;
    const detailLabel = doc.createElement("label");
    detailLabel.className = "control";
    detailLabel.textContent = "Detail level ";
    this.detailSelect = doc.createElement("select");
    this.detailSelect.className = "detail-select";
    this.detailSelect.setAttribute("aria-label", "Detail level");
    for (const detail of DETAILS) {
      const option = doc.createElement("option");
      option.value = detail;
      option.textContent = detail;
      this.detailSelect.append(option);
    }
    this.detailSelect.addEventListener("change", () => {
      this.callbacks.onDetail(this.detailSelect.value);
    });
    detailLabel.append(this.detailSelect);

    const langGroup = doc.createElement("div");
    langGroup.className = "control language-toggle";
    langGroup.setAttribute("role", "group");
    langGroup.setAttribute("aria-label", "Language");
    for (const language of LANGUAGES) {
      const button = doc.createElement("button");
      button.type = "button";
      button.className = "language-button";
      button.dataset.language = language;
      button.textContent = language;
      button.setAttribute("aria-label", `Switch language to ${language}`);
      button.setAttribute("aria-pressed", "false");
      button.addEventListener("click", () => this.callbacks.onLanguage(language));
      this.languageButtons.set(language, button);
      langGroup.append(button);
    }

    this.indicator = doc.createElement("span");
    this.indicator.className = "connection-indicator";
    this.indicator.setAttribute("role", "status");
    this.indicator.textContent = "connecting";

    this.container.append(detailLabel, langGroup, this.indicator);
  }

  reflect(profile: Profile): void {
    this.detailSelect.value = profile.detail;
    for (const [language, button] of this.languageButtons) {
      button.setAttribute("aria-pressed", String(language === profile.language));
    }
  }

  setConnection(state: "connected" | "reconnecting"): void {
    this.indicator.textContent = state;
    this.indicator.classList.toggle("connected", state === "connected");
  }
}

/** Explanation message cards: pictogram chips, text in the active language,
 * and yes/no feedback buttons. Newest messages last, capped at 50. */

import type { ExplanationMessage } from "./types.js";

export const MESSAGE_CAP = 50;

const FEEDBACK_PROMPT: Record<string, string> = {
  en: "Did this explanation help you understand my decision? Press yes or no.",
  es: "¿Te ayudó esta explicación a entender mi decisión? Pulsa sí o no.",
};

const FEEDBACK_LABELS: Record<string, { yes: string; no: string }> = {
  en: { yes: "yes", no: "no" },
  es: { yes: "sí", no: "no" },
};

export interface MessageCallbacks {
  onFeedback: (messageId: string, helpful: boolean) => Promise<unknown>;
}

export class MessageList {
  readonly messages: ExplanationMessage[] = [];

  constructor(
    private container: HTMLElement,
    private callbacks: MessageCallbacks,
    private language: string = "en",
  ) {}

  setLanguage(language: string): void {
    this.language = language;
  }

  add(message: ExplanationMessage): HTMLElement {
    this.messages.push(message);
    const card = this.buildCard(message);
    this.container.append(card);
    while (this.messages.length > MESSAGE_CAP) {
      this.messages.shift();
      this.container.firstElementChild?.remove();
    }
    card.scrollIntoView?.({ block: "end" });
    return card;
  }

  private buildCard(message: ExplanationMessage): HTMLElement {
    const doc = this.container.ownerDocument;
    const card = doc.createElement("article");
    card.className = `message-card source-${message.source}`;
    card.dataset.messageId = message.id;

    const chips = doc.createElement("div");
    chips.className = "picto-row";
    chips.setAttribute("aria-hidden", "true");
    for (const picto of message.pictograms) {
      const chip = doc.createElement("span");
      chip.className = "picto-chip";
      chip.textContent = picto.fallback_text;
      chips.append(chip);
    }
    card.append(chips);

    const pictogramOnly = message.modality.includes("pictogram-only");
    const textContent = message.text[this.language] ?? message.text.en ?? "";
    if (!pictogramOnly) {
      const text = doc.createElement("p");
      text.className = "message-text";
      text.textContent = textContent;
      card.append(text);
    }
    // pictogram-only cards stay readable for assistive tech via the label
    card.setAttribute("aria-label", textContent);

    const note = message.relevance_note?.[this.language] ?? message.relevance_note?.en;
    if (note && !pictogramOnly) {
      const relevance = doc.createElement("p");
      relevance.className = "relevance-note";
      relevance.textContent = note;
      card.append(relevance);
    }

    card.append(this.buildFeedback(message, doc));
    return card;
  }

  private buildFeedback(message: ExplanationMessage, doc: Document): HTMLElement {
    const group = doc.createElement("div");
    group.className = "feedback-group";
    group.setAttribute("role", "group");
    const prompt = FEEDBACK_PROMPT[this.language] ?? FEEDBACK_PROMPT.en;
    group.setAttribute("aria-label", prompt);
    group.title = prompt;
    const labels = FEEDBACK_LABELS[this.language] ?? FEEDBACK_LABELS.en;
    for (const helpful of [true, false]) {
      const button = doc.createElement("button");
      button.type = "button";
      button.className = "feedback-button";
      button.dataset.helpful = String(helpful);
      button.textContent = helpful ? labels.yes : labels.no;
      button.setAttribute(
        "aria-label",
        `${helpful ? labels.yes : labels.no}: ${prompt}`,
      );
      button.addEventListener("click", () => {
        if (button.disabled) return;
        // exactly one submission per card
        for (const sibling of group.querySelectorAll("button")) {
          (sibling as HTMLButtonElement).disabled = true;
        }
        this.callbacks.onFeedback(message.id, helpful).catch(() => {
          for (const sibling of group.querySelectorAll("button")) {
            (sibling as HTMLButtonElement).disabled = false;
          }
        });
      });
      group.append(button);
    }
    return group;
  }
}

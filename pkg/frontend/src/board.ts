/** Board rendering: one button per command cell, inert chips for display
 * cells. A press posts the cell's token and keeps the button disabled until
 * the gateway acknowledges; failures show a retry affordance instead of
 * crashing or double-sending. */

import type { Board, Cell } from "./types.js";
import { BoardSchemaError, parseBoard } from "./types.js";

export interface BoardCallbacks {
  onPress: (token: string) => Promise<unknown>;
}

function cellLabel(cell: Cell, language: string): string {
  return cell.labels?.[language] ?? cell.labels?.en ?? cell.concept;
}

function cellChipText(cell: Cell): string {
  return cell.pictogram?.fallback_text ?? cell.concept;
}

function buildCommandCell(cell: Cell, language: string, callbacks: BoardCallbacks, doc: Document): HTMLElement {
  const button = doc.createElement("button");
  button.type = "button";
  button.className = "cell cell-button";
  button.dataset.token = cell.action.token ?? "";
  button.dataset.cellId = cell.id;
  const label = cellLabel(cell, language);
  button.setAttribute("aria-label", label);

  const chip = doc.createElement("span");
  chip.className = "picto-chip";
  chip.textContent = cellChipText(cell);
  chip.setAttribute("aria-hidden", "true");
  const text = doc.createElement("span");
  text.className = "cell-label";
  text.textContent = label;
  button.append(chip, text);

  const retry = doc.createElement("span");
  retry.className = "retry-hint";
  retry.hidden = true;
  retry.textContent = "retry";
  button.append(retry);

  button.addEventListener("click", () => {
    if (button.disabled) return; // debounce: one request in flight per cell
    button.disabled = true;
    retry.hidden = true;
    callbacks
      .onPress(button.dataset.token ?? "")
      .then(() => {
        button.disabled = false;
      })
      .catch(() => {
        button.disabled = false;
        retry.hidden = false; // visible, non-blocking failure affordance
      });
  });
  return button;
}

function buildDisplayCell(cell: Cell, language: string, doc: Document): HTMLElement {
  const element = doc.createElement("div");
  element.className = "cell cell-display";
  element.dataset.cellId = cell.id;
  const chip = doc.createElement("span");
  chip.className = "picto-chip";
  chip.textContent = cellChipText(cell);
  chip.setAttribute("aria-hidden", "true");
  const text = doc.createElement("span");
  text.className = "cell-label";
  text.textContent = cellLabel(cell, language);
  element.append(chip, text);
  return element;
}

/** Render a board document into container. Schema violations render an
 * error panel and nothing else. */
export function renderBoard(
  container: HTMLElement,
  rawBoard: unknown,
  language: string,
  callbacks: BoardCallbacks,
): Board | null {
  const doc = container.ownerDocument;
  container.replaceChildren();
  let board: Board;
  try {
    board = parseBoard(rawBoard);
  } catch (err) {
    const panel = doc.createElement("div");
    panel.className = "error-panel";
    panel.setAttribute("role", "alert");
    panel.textContent =
      err instanceof BoardSchemaError ? `Board file invalid: ${err.message}` : "Board file invalid.";
    container.append(panel);
    return null;
  }
  const grid = doc.createElement("div");
  grid.className = "board-grid";
  grid.setAttribute("role", "group");
  grid.setAttribute("aria-label", board.name[language] ?? board.name.en ?? board.id);
  grid.style.gridTemplateColumns = `repeat(${board.cols}, minmax(48px, 1fr))`;
  for (const cell of board.cells) {
    const element =
      cell.action.kind === "command"
        ? buildCommandCell(cell, language, callbacks, doc)
        : buildDisplayCell(cell, language, doc);
    element.style.gridRow = String(cell.row + 1);
    element.style.gridColumn = String(cell.col + 1);
    grid.append(element);
  }
  container.append(grid);
  return board;
}

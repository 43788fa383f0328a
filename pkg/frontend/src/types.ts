/** Wire types for the gateway's board files and explanation messages. */

export interface PictogramRef {
  catalog_id: number;
  fallback_text: string;
  /** reserved for later pictogram asset integration */
  image_url?: string;
}

export interface CellAction {
  kind: "command" | "display";
  token?: string;
}

export interface Cell {
  id: string;
  row: number;
  col: number;
  concept: string;
  action: CellAction;
  /** per-language labels, denormalized from the concept catalog */
  labels?: Record<string, string>;
  pictogram?: PictogramRef;
}

export interface Board {
  id: string;
  rows: number;
  cols: number;
  name: Record<string, string>;
  cells: Cell[];
}

export interface ExplanationMessage {
  id: string;
  source: "robot-initiated" | "user-initiated" | "system";
  concepts: { concepts: string[]; cause_concept: string | null };
  text: Record<string, string>;
  pictograms: PictogramRef[];
  modality: string[];
  detail: string;
  provenance: number | null;
  relevance_note: Record<string, string> | null;
}

export interface Profile {
  user_id: string;
  detail: string;
  language: string;
  modality_pref: string[];
  noisy_env: boolean;
  low_vision: boolean;
  pace_ms: number;
}

export class BoardSchemaError extends Error {}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

/** Validate a board document; throws BoardSchemaError rather than letting a
 * partial board reach the renderer. */
export function parseBoard(raw: unknown): Board {
  if (!isRecord(raw)) throw new BoardSchemaError("board is not an object");
  const { id, rows, cols, name, cells } = raw as Partial<Board> & Record<string, unknown>;
  if (typeof id !== "string" || !id) throw new BoardSchemaError("board id missing");
  if (typeof rows !== "number" || typeof cols !== "number" || rows < 1 || cols < 1) {
    throw new BoardSchemaError("board dimensions invalid");
  }
  if (!isRecord(name)) throw new BoardSchemaError("board name map missing");
  if (!Array.isArray(cells) || cells.length === 0) throw new BoardSchemaError("board has no cells");
  const seenPositions = new Set<string>();
  for (const cell of cells) {
    if (!isRecord(cell)) throw new BoardSchemaError("cell is not an object");
    if (typeof cell.id !== "string" || typeof cell.concept !== "string") {
      throw new BoardSchemaError(`cell ${String(cell.id)} malformed`);
    }
    if (
      typeof cell.row !== "number" || typeof cell.col !== "number" ||
      cell.row < 0 || cell.row >= rows || cell.col < 0 || cell.col >= cols
    ) {
      throw new BoardSchemaError(`cell ${cell.id} position out of range`);
    }
    const key = `${cell.row},${cell.col}`;
    if (seenPositions.has(key)) throw new BoardSchemaError(`cells overlap at ${key}`);
    seenPositions.add(key);
    const action = cell.action;
    if (!isRecord(action) || (action.kind !== "command" && action.kind !== "display")) {
      throw new BoardSchemaError(`cell ${cell.id} has invalid action`);
    }
    if (action.kind === "command" && (typeof action.token !== "string" || !action.token)) {
      throw new BoardSchemaError(`cell ${cell.id} command without token`);
    }
  }
  return raw as unknown as Board;
}

/** Parse one explanation event payload; null (plus a console warning) on
 * anything unparseable so the stream keeps flowing. */
export function parseMessage(data: string): ExplanationMessage | null {
  try {
    const raw = JSON.parse(data);
    if (!isRecord(raw)) throw new Error("not an object");
    if (typeof raw.id !== "string" || !isRecord(raw.text) || !Array.isArray(raw.pictograms)) {
      throw new Error("missing message fields");
    }
    return raw as unknown as ExplanationMessage;
  } catch (err) {
    console.warn("dropping unparseable explanation event:", err);
    return null;
  }
}

"""Communication board generation, validation and export.

Three boards ship with the system: a small interaction panel for quick
queries, a display-only board spelling out the obstacle-avoidance message,
and a full grid mixing goals, actions, objects and cues. Cell inventories
are frozen here; exports are byte-stable JSON files.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .dialogue import parse_token
from .errors import UnknownKind, UnknownToken
from .lexicon import Catalog

BOARD_KINDS = ("interaction", "explanation", "full")

_BOARD_NAMES = {
    "interaction": {"en": "Interaction board", "es": "Panel de interacción"},
    "explanation": {"en": "Explanation board", "es": "Panel de explicación"},
    "full": {"en": "Full communication board", "es": "Panel de comunicación completo"},
}


@dataclass(frozen=True)
class Cell:
    id: str
    row: int
    col: int
    concept: str
    action: dict  # {"kind": "command", "token": ...} or {"kind": "display"}
    labels: dict = None  # language -> label, denormalized for the UI
    pictogram: dict = None  # {"catalog_id", "fallback_text"}

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "row": self.row,
            "col": self.col,
            "concept": self.concept,
            "action": dict(self.action),
            "labels": dict(self.labels or {}),
            "pictogram": dict(self.pictogram or {}),
        }


@dataclass(frozen=True)
class Board:
    id: str
    name: dict
    rows: int
    cols: int
    cells: tuple

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "rows": self.rows,
            "cols": self.cols,
            "name": dict(self.name),
            "cells": [c.to_dict() for c in self.cells],
        }

    def command_tokens(self) -> list[str]:
        return [c.action["token"] for c in self.cells if c.action.get("kind") == "command"]


def _cmd(concept: str, token: str | None = None, *, cell_id: str | None = None) -> tuple:
    return (cell_id or f"c-{concept}", concept, {"kind": "command", "token": token or concept})


def _disp(concept: str) -> tuple:
    return (f"c-{concept}", concept, {"kind": "display"})


# (rows, cols, cell specs in reading order)
_LAYOUTS = {
    "interaction": (
        3,
        3,
        [
            _cmd("why"), _cmd("stop"), _cmd("wait"),
            _cmd("go"), _cmd("yes"), _cmd("no"),
            _disp("robot"), _disp("person"), _disp("object"),
        ],
    ),
    "explanation": (
        1,
        4,
        [_disp("robot"), _disp("turn"), _disp("object"), _disp("path")],
    ),
    "full": (
        4,
        6,
        [
            _cmd("why"), _cmd("stop"), _cmd("wait"), _cmd("go"), _cmd("yes"), _cmd("no"),
            _disp("want"), _disp("take"), _disp("box"), _disp("carry"), _disp("robot"), _disp("person"),
            _disp("object"), _disp("obstacle"), _disp("path"), _cmd("goal"), _disp("turn"), _disp("safety"),
            _cmd("loading-zone", "set-goal:loading-zone"),
            _cmd("charging-zone", "set-goal:charging-zone"),
            _cmd("warehouse", "set-goal:warehouse"),
            _cmd("slam", "define:SLAM"),
            _cmd("language", "language:es", cell_id="c-language-es"),
            _cmd("language", "language:en", cell_id="c-language-en"),
        ],
    ),
}


def generate_board(kind: str, langs: list[str], catalog: Catalog) -> Board:
    if kind not in _LAYOUTS:
        raise UnknownKind(kind)
    rows, cols, specs = _LAYOUTS[kind]
    cells = []
    for index, (cell_id, concept, action) in enumerate(specs):
        labels = {lang: catalog.label(concept, lang) for lang in langs if concept in catalog}
        picto = catalog.pictogram(concept).to_dict() if concept in catalog else {}
        cells.append(
            Cell(
                id=cell_id,
                row=index // cols,
                col=index % cols,
                concept=concept,
                action=action,
                labels=labels,
                pictogram=picto,
            )
        )
    name = {lang: _BOARD_NAMES[kind].get(lang, _BOARD_NAMES[kind]["en"]) for lang in langs}
    return Board(id=kind, name=name, rows=rows, cols=cols, cells=tuple(cells))


def generate_all(langs: list[str], catalog: Catalog) -> list[Board]:
    return [generate_board(kind, langs, catalog) for kind in BOARD_KINDS]


def validate_board(board: Board, catalog: Catalog) -> list[str]:
    """Empty list iff every board invariant holds."""
    violations = []
    positions = set()
    ids = set()
    for cell in board.cells:
        if not (0 <= cell.row < board.rows and 0 <= cell.col < board.cols):
            violations.append(f"cell {cell.id!r} position ({cell.row},{cell.col}) outside {board.rows}x{board.cols}")
        if (cell.row, cell.col) in positions:
            violations.append(f"cells overlap at ({cell.row},{cell.col})")
        positions.add((cell.row, cell.col))
        if cell.id in ids:
            violations.append(f"duplicate cell id {cell.id!r}")
        ids.add(cell.id)
        if cell.concept not in catalog:
            violations.append(f"cell {cell.id!r} uses unknown concept {cell.concept!r}")
        kind = cell.action.get("kind")
        if kind == "command":
            token = cell.action.get("token", "")
            try:
                parse_token(token)
            except UnknownToken:
                violations.append(f"cell {cell.id!r} carries invalid command token {token!r}")
        elif kind != "display":
            violations.append(f"cell {cell.id!r} has unknown action kind {kind!r}")
    return violations


def board_json(board: Board) -> str:
    return json.dumps(board.to_dict(), ensure_ascii=False, indent=2) + "\n"


def export_boards(out_dir: str | Path, langs: list[str], catalog: Catalog) -> list[Path]:
    """Write one JSON file per board; whole-file atomic, byte-stable."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for board in generate_all(langs, catalog):
        path = out / f"{board.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(board_json(board), "utf-8")
        os.replace(tmp, path)
        written.append(path)
    return written

"""Semantic layer: maps robot internal events onto predefined concept
sequences, with the cause of the event carried as an explicit slot.

The mapping is a static table loaded from JSON (one row per event type,
with {cause}/{goal}/{object} slot substitution), so it can be audited and
tested by plain enumeration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import UnmappableEvent
from .lexicon import Catalog

EVENT_TYPES = (
    "TURN",
    "STOP",
    "WAIT",
    "RESUME",
    "GOAL_SET",
    "GOAL_REACHED",
    "PICK",
    "PLACE",
    "PLAN_CHANGED",
    "BATTERY_LOW",
)

CAUSES = ("obstacle", "person", "command", "battery", "replan")


@dataclass(frozen=True)
class RobotEvent:
    """One timestamped internal robot occurrence."""

    seq: int
    sim_time: int
    type: str
    cause: str | None = None
    object: str | None = None
    goal: str | None = None
    location: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "sim_time": self.sim_time,
            "type": self.type,
            "cause": self.cause,
            "object": self.object,
            "goal": self.goal,
            "location": list(self.location) if self.location is not None else None,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RobotEvent":
        loc = raw.get("location")
        return cls(
            seq=int(raw["seq"]),
            sim_time=int(raw["sim_time"]),
            type=str(raw["type"]),
            cause=raw.get("cause"),
            object=raw.get("object"),
            goal=raw.get("goal"),
            location=tuple(loc) if loc is not None else None,
        )


@dataclass(frozen=True)
class ConceptSequence:
    concepts: tuple[str, ...]
    cause_concept: str | None = None

    def to_dict(self) -> dict:
        return {"concepts": list(self.concepts), "cause_concept": self.cause_concept}


@dataclass
class _Row:
    pattern: list[str]
    cause_slot: bool
    cause_concept: str
    action: str


def _load_table(path: str | Path | None) -> dict:
    if path is None:
        return json.loads(resources.files("pictobridge.data").joinpath("event_map.json").read_text("utf-8"))
    return json.loads(Path(path).read_text("utf-8"))


class EventMapper:
    """Table-driven event-to-concept mapping. Pure functions over the table."""

    def __init__(self, catalog: Catalog, table_path: str | Path | None = None):
        raw = _load_table(table_path)
        self.catalog = catalog
        self.cause_concepts: dict[str, str] = dict(raw["cause_concepts"])
        self._rows: dict[str, _Row] = {}
        for event_type, row in raw["events"].items():
            self._rows[event_type] = _Row(
                pattern=list(row["concepts"]),
                cause_slot=bool(row.get("cause_slot", False)),
                cause_concept=str(row.get("cause_concept", "{cause}")),
                action=str(row["action"]),
            )
        self._check_table()

    def _check_table(self) -> None:
        # The table ships with the package; a gap here is a packaging bug.
        for event_type, row in self._rows.items():
            for entry in row.pattern:
                if not entry.startswith("{") and entry not in self.catalog:
                    raise UnmappableEvent(f"{event_type}: concept {entry!r} not in catalog")
            if row.action not in self.catalog:
                raise UnmappableEvent(f"{event_type}: action concept {row.action!r} not in catalog")
        for cause, concept in self.cause_concepts.items():
            if concept not in self.catalog:
                raise UnmappableEvent(f"cause {cause!r} maps to unknown concept {concept!r}")

    def known_event_types(self) -> list[str]:
        return list(self._rows)

    def action_concept(self, event_type: str) -> str:
        """The single concept used when an event is summarized."""
        try:
            return self._rows[event_type].action
        except KeyError:
            raise UnmappableEvent(event_type) from None

    def _resolve_slot(self, slot: str, event: RobotEvent) -> str | None:
        if slot == "{cause}":
            if event.cause is None:
                return None
            # Unknown causes degrade to dropping the clause, not to an error.
            return self.cause_concepts.get(event.cause)
        if slot == "{goal}":
            return event.goal
        if slot == "{object}":
            return event.object
        return slot

    def map_event(self, event: RobotEvent) -> ConceptSequence:
        try:
            row = self._rows[event.type]
        except KeyError:
            raise UnmappableEvent(event.type) from None
        concepts: list[str] = []
        for entry in row.pattern:
            resolved = self._resolve_slot(entry, event)
            if resolved is not None and resolved in self.catalog:
                concepts.append(resolved)
        cause_concept = None
        if row.cause_slot and event.cause is not None:
            cause_concept = self._resolve_slot(row.cause_concept, event)
            if cause_concept not in concepts:
                cause_concept = None
        return ConceptSequence(concepts=tuple(concepts), cause_concept=cause_concept)

    def cause_concept_for(self, cause: str | None) -> str | None:
        if cause is None:
            return None
        return self.cause_concepts.get(cause)


def load_mapper(catalog: Catalog, table_path: str | Path | None = None) -> EventMapper:
    return EventMapper(catalog, table_path)

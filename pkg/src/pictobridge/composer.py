"""Message construction: turns concept sequences into short per-language
texts plus aligned pictogram sequences.

Rendering is template-based. Event templates are keyed
``"<EVENT>/<detail>/<lang>"`` with an optional cause-refined variant
``"<EVENT>@<cause>/<detail>/<lang>"`` tried first; reply templates for user
queries and system acknowledgments use the pseudo-detail ``any`` because a
clarification should read the same regardless of the verbosity tier.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .errors import MissingTemplate, UnknownConcept, UnknownLanguage
from .lexicon import Catalog, PictogramRef
from .mapper import ConceptSequence, RobotEvent

DETAIL_LEVELS = ("basic", "standard", "expert")

VISUAL = "visual"
AUDIO_SCRIPT = "audio-script"
PICTOGRAM_ONLY = "pictogram-only"
MODALITIES = (VISUAL, AUDIO_SCRIPT, PICTOGRAM_ONLY)

SOURCES = ("robot-initiated", "user-initiated", "system")


def lower_detail(detail: str) -> str:
    """One step down the basic < standard < expert order, floored at basic."""
    idx = DETAIL_LEVELS.index(detail)
    return DETAIL_LEVELS[max(0, idx - 1)]


def word_count(text: str) -> int:
    return len(text.split())


@dataclass
class ExplanationMessage:
    id: str
    source: str
    concepts: ConceptSequence
    text: dict  # language code -> rendered text
    pictograms: list[PictogramRef]
    modality: frozenset
    detail: str
    provenance: int | None = None
    relevance_note: dict | None = None
    # render bookkeeping so a message can be re-rendered at another detail;
    # not part of the wire format
    render_key: str | None = field(default=None, repr=False)
    render_cause: str | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "concepts": self.concepts.to_dict(),
            "text": {lang: self.text[lang] for lang in sorted(self.text)},
            "pictograms": [p.to_dict() for p in self.pictograms],
            "modality": sorted(self.modality),
            "detail": self.detail,
            "provenance": self.provenance,
            "relevance_note": (
                {lang: self.relevance_note[lang] for lang in sorted(self.relevance_note)}
                if self.relevance_note
                else None
            ),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExplanationMessage":
        seq = ConceptSequence(
            concepts=tuple(raw["concepts"]["concepts"]),
            cause_concept=raw["concepts"].get("cause_concept"),
        )
        return cls(
            id=raw["id"],
            source=raw["source"],
            concepts=seq,
            text=dict(raw["text"]),
            pictograms=[PictogramRef(p["catalog_id"], p["fallback_text"]) for p in raw["pictograms"]],
            modality=frozenset(raw["modality"]),
            detail=raw["detail"],
            provenance=raw.get("provenance"),
            relevance_note=dict(raw["relevance_note"]) if raw.get("relevance_note") else None,
        )


def _load_templates(path: str | Path | None) -> dict:
    if path is None:
        return json.loads(resources.files("pictobridge.data").joinpath("templates.json").read_text("utf-8"))
    return json.loads(Path(path).read_text("utf-8"))


class Composer:
    """Renders concept sequences into multilingual explanation messages."""

    def __init__(self, catalog: Catalog, templates_path: str | Path | None = None):
        raw = _load_templates(templates_path)
        self.catalog = catalog
        self.templates: dict[str, str] = dict(raw["templates"])
        self.language_names: dict[str, dict] = dict(raw["language_names"])

    # -- template lookup ----------------------------------------------------

    def template_keys(self) -> list[str]:
        return list(self.templates)

    def _lookup(self, key: str, cause: str | None, detail: str, lang: str) -> str:
        if cause is not None:
            refined = self.templates.get(f"{key}@{cause}/{detail}/{lang}")
            if refined is not None:
                return refined
        base = self.templates.get(f"{key}/{detail}/{lang}")
        if base is None:
            raise MissingTemplate(f"{key}/{detail}/{lang}")
        return base

    def _fill(self, template: str, values: dict) -> str:
        try:
            return template.format(**values)
        except (KeyError, IndexError) as exc:
            raise MissingTemplate(f"unfilled slot {exc} in {template!r}") from exc

    def _event_slot_labels(self, event: RobotEvent, cause_concept: str | None, lang: str) -> dict:
        values: dict[str, str] = {}
        if cause_concept is not None:
            values["cause"] = self.catalog.label(cause_concept, lang)
        if event.goal is not None and event.goal in self.catalog:
            values["goal"] = self.catalog.label(event.goal, lang)
        if event.object is not None and event.object in self.catalog:
            values["object"] = self.catalog.label(event.object, lang)
        return values

    def _pictograms(self, seq: ConceptSequence) -> list[PictogramRef]:
        return [self.catalog.pictogram(c) for c in seq.concepts]

    # -- public operations --------------------------------------------------

    def compose(
        self,
        seq: ConceptSequence,
        event: RobotEvent,
        policy,
        *,
        msg_id: str = "m-0",
        source: str = "robot-initiated",
        recall: dict | None = None,
        relevance: dict | None = None,
        cause_concept: str | None = None,
    ) -> ExplanationMessage:
        """Render a robot event's concept sequence at the policy's detail.

        ``recall`` is an optional per-language prior-experience clause that
        gets appended to the text; ``relevance`` fills the relevance_note
        field without touching the text.
        """
        detail = policy.detail
        text: dict[str, str] = {}
        for lang in self.catalog.languages:
            template = self._lookup(event.type, event.cause, detail, lang)
            rendered = self._fill(template, self._event_slot_labels(event, cause_concept or seq.cause_concept, lang))
            if recall and lang in recall:
                rendered = f"{rendered} {recall[lang]}"
            text[lang] = rendered
        return ExplanationMessage(
            id=msg_id,
            source=source,
            concepts=seq,
            text=text,
            pictograms=self._pictograms(seq),
            modality=frozenset(policy.modality),
            detail=detail,
            provenance=event.seq,
            relevance_note=dict(relevance) if relevance else None,
            render_key=event.type,
            render_cause=event.cause,
        )

    def render_reply(
        self,
        key: str,
        concepts: ConceptSequence,
        policy,
        *,
        msg_id: str,
        source: str = "user-initiated",
        provenance: int | None = None,
        concept_slots: dict | None = None,
        literal_slots: dict | None = None,
    ) -> ExplanationMessage:
        """Render a user-query reply or system message from an ``any`` template."""
        text: dict[str, str] = {}
        for lang in self.catalog.languages:
            template = self._lookup(key, None, "any", lang)
            values = dict(literal_slots or {})
            for name, concept_id in (concept_slots or {}).items():
                values[name] = self.catalog.label(concept_id, lang)
            text[lang] = self._fill(template, values)
        return ExplanationMessage(
            id=msg_id,
            source=source,
            concepts=concepts,
            text=text,
            pictograms=self._pictograms(concepts),
            modality=frozenset(policy.modality),
            detail=policy.detail,
            provenance=provenance,
            render_key=key,
        )

    def confirm_language(self, lang: str, policy, *, msg_id: str = "m-0") -> ExplanationMessage:
        """System confirmation that the active language changed."""
        if lang not in self.catalog.languages:
            raise UnknownLanguage(lang)
        names = self.language_names[lang]
        concepts = ConceptSequence(concepts=("language", "robot", "person", "safety"))
        text: dict[str, str] = {}
        for render_lang in self.catalog.languages:
            template = self._lookup("LANGUAGE_SET", None, "any", render_lang)
            text[render_lang] = self._fill(template, {"language": names[render_lang]})
        return ExplanationMessage(
            id=msg_id,
            source="system",
            concepts=concepts,
            text=text,
            pictograms=self._pictograms(concepts),
            modality=frozenset(policy.modality),
            detail=policy.detail,
            render_key="LANGUAGE_SET",
        )

    def relevance_clause(self, goal: str, lang: str) -> str:
        """One clause linking the current route to the user's destination."""
        if goal not in self.catalog:
            raise UnknownConcept(goal)
        if lang not in self.catalog.languages:
            raise UnknownLanguage(lang)
        template = self._lookup("RELEVANCE", None, "any", lang)
        return self._fill(template, {"goal": self.catalog.label(goal, lang)})

    def recall_clause(self, tick: int, lang: str) -> str:
        template = self._lookup("RECALL", None, "any", lang)
        return self._fill(template, {"tick": str(tick)})

    def reformulate(
        self,
        msg: ExplanationMessage,
        mode: str,
        *,
        event: RobotEvent | None = None,
        new_id: str | None = None,
    ) -> ExplanationMessage:
        """Re-render a message simpler, or as a pictogram-only variant.

        ``simpler`` steps the detail down one level (floor at basic) and
        re-renders the text; ``images`` keeps everything but switches the
        modality hint to pictogram-only.
        """
        if mode == "images":
            return replace(msg, modality=frozenset({PICTOGRAM_ONLY}))
        if mode != "simpler":
            raise ValueError(f"unknown reformulation mode {mode!r}")
        if msg.detail == "basic" or msg.detail not in DETAIL_LEVELS:
            return msg
        detail = lower_detail(msg.detail)
        # only event messages have detail-keyed templates; query replies and
        # system messages read the same at every tier, so their text stands
        rerenderable = (
            msg.render_key is not None
            and event is not None
            and all(f"{msg.render_key}/{detail}/{lang}" in self.templates for lang in self.catalog.languages)
        )
        text: dict[str, str] = {}
        for lang in self.catalog.languages:
            if rerenderable:
                template = self._lookup(msg.render_key, msg.render_cause, detail, lang)
                text[lang] = self._fill(
                    template, self._event_slot_labels(event, msg.concepts.cause_concept, lang)
                )
            else:
                text[lang] = msg.text[lang]
        return replace(msg, id=new_id or msg.id, detail=detail, text=text, relevance_note=msg.relevance_note)

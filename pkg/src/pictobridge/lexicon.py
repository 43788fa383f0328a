"""Concept catalog: concept ids, per-language labels, pictogram references,
and plain-language definitions of technical terms.

The catalog is loaded from a versioned JSON file and is immutable afterwards,
so lookups are safe from any thread. Reloading means building a new Catalog.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import UnknownConcept, UnknownLanguage, UnknownTerm

CONCEPT_ID_RE = re.compile(r"^[a-z][a-z0-9-]*$")
CATEGORIES = ("action", "agent", "object", "goal", "cue", "quality")


@dataclass(frozen=True)
class PictogramRef:
    """Opaque reference into an external pictogram catalog."""

    catalog_id: int
    fallback_text: str

    def to_dict(self) -> dict:
        return {"catalog_id": self.catalog_id, "fallback_text": self.fallback_text}


@dataclass(frozen=True)
class Concept:
    id: str
    category: str
    labels: dict  # language code -> label text
    pictogram: PictogramRef


@dataclass(frozen=True)
class TermDefinition:
    term: str
    definition: dict  # language code -> definition text


class Catalog:
    """Immutable concept catalog with label, pictogram and term lookups."""

    def __init__(self, languages: list[str], concepts: list[Concept], terms: list[TermDefinition]):
        self.languages = tuple(languages)
        self.entries = tuple(concepts)  # original order, duplicates preserved for validation
        self.term_entries = tuple(terms)
        self._concepts = {c.id: c for c in concepts}
        self._terms = {t.term: t for t in terms}

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self._concepts

    def concept_ids(self) -> list[str]:
        return list(self._concepts)

    def concept(self, concept_id: str) -> Concept:
        try:
            return self._concepts[concept_id]
        except KeyError:
            raise UnknownConcept(concept_id) from None

    def label(self, concept_id: str, lang: str) -> str:
        if lang not in self.languages:
            raise UnknownLanguage(lang)
        return self.concept(concept_id).labels[lang]

    def pictogram(self, concept_id: str) -> PictogramRef:
        return self.concept(concept_id).pictogram

    def define_term(self, term: str, lang: str) -> str:
        if term not in self._terms:
            raise UnknownTerm(term)
        if lang not in self.languages:
            raise UnknownLanguage(lang)
        return self._terms[term].definition[lang]

    def terms(self) -> list[str]:
        return list(self._terms)


def _parse_concept(raw: dict) -> Concept:
    picto = raw.get("pictogram", {})
    return Concept(
        id=str(raw.get("id", "")),
        category=str(raw.get("category", "")),
        labels=dict(raw.get("labels", {})),
        pictogram=PictogramRef(
            catalog_id=int(picto.get("catalog_id", 0)),
            fallback_text=str(picto.get("fallback_text", "")),
        ),
    )


def load_catalog(path: str | Path | None = None) -> Catalog:
    """Load a catalog file, or the one shipped with the package."""
    if path is None:
        raw = json.loads(resources.files("pictobridge.data").joinpath("catalog.json").read_text("utf-8"))
    else:
        raw = json.loads(Path(path).read_text("utf-8"))
    languages = list(raw.get("languages", []))
    concepts = [_parse_concept(c) for c in raw.get("concepts", [])]
    terms = [
        TermDefinition(term=str(t.get("term", "")), definition=dict(t.get("definition", {})))
        for t in raw.get("terms", [])
    ]
    return Catalog(languages, concepts, terms)


def validate_catalog(catalog: Catalog) -> list[str]:
    """Check every catalog invariant; returns violations (empty when clean).

    Violations are data, not exceptions: a corrupt catalog should be
    reportable in full, not fail on the first bad entry.
    """
    violations: list[str] = []
    if not catalog.languages:
        violations.append("catalog declares no languages")
    for required in ("en", "es"):
        if required not in catalog.languages:
            violations.append(f"catalog must declare language {required!r}")

    seen_ids: set[str] = set()
    seen_picto: dict[int, str] = {}
    for concept in catalog.entries:
        if concept.id in seen_ids:
            violations.append(f"duplicate concept id {concept.id!r}")
        seen_ids.add(concept.id)
        if not CONCEPT_ID_RE.match(concept.id):
            violations.append(f"concept id {concept.id!r} is not lowercase-hyphenated")
        if concept.category not in CATEGORIES:
            violations.append(f"concept {concept.id!r} has unknown category {concept.category!r}")
        for lang in catalog.languages:
            if not concept.labels.get(lang):
                violations.append(f"concept {concept.id!r} is missing a {lang!r} label")
        picto = concept.pictogram
        if picto.catalog_id <= 0:
            violations.append(f"concept {concept.id!r} has non-positive pictogram id {picto.catalog_id}")
        if not picto.fallback_text:
            violations.append(f"concept {concept.id!r} has empty pictogram fallback text")
        if picto.catalog_id in seen_picto and seen_picto[picto.catalog_id] != concept.id:
            violations.append(
                f"pictogram id {picto.catalog_id} shared by {seen_picto[picto.catalog_id]!r} and {concept.id!r}"
            )
        else:
            seen_picto.setdefault(picto.catalog_id, concept.id)

    seen_terms: set[str] = set()
    for term in catalog.term_entries:
        if term.term in seen_terms:
            violations.append(f"duplicate term {term.term!r}")
        seen_terms.add(term.term)
        for lang in catalog.languages:
            if not term.definition.get(lang):
                violations.append(f"term {term.term!r} is missing a {lang!r} definition")
    return violations


def validate_catalog_file(path: str | Path) -> list[str]:
    """Validate a catalog JSON file; parse errors become violations."""
    try:
        catalog = load_catalog(path)
    except (OSError, ValueError) as exc:
        return [f"cannot read catalog: {exc}"]
    return validate_catalog(catalog)

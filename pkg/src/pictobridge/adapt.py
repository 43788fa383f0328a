"""User profiles, the effective rendering policy derived from them, and the
append-only explanation feedback ledger."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .composer import AUDIO_SCRIPT, DETAIL_LEVELS, MODALITIES, VISUAL, lower_detail
from .errors import IllegalValue, UnknownMessage
from .lexicon import Catalog

MAX_PACE_MS = 60000


@dataclass(frozen=True)
class UserProfile:
    user_id: str = "default"
    detail: str = "standard"
    language: str = "en"
    modality_pref: frozenset = frozenset({VISUAL})
    noisy_env: bool = False
    low_vision: bool = False
    pace_ms: int = 0

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "detail": self.detail,
            "language": self.language,
            "modality_pref": sorted(self.modality_pref),
            "noisy_env": self.noisy_env,
            "low_vision": self.low_vision,
            "pace_ms": self.pace_ms,
        }


@dataclass(frozen=True)
class Policy:
    detail: str
    language: str
    modality: frozenset
    pace_ms: int


@dataclass(frozen=True)
class FeedbackEntry:
    message_id: str
    helpful: bool
    timestamp: float


@dataclass
class FeedbackLedger:
    """Append-only record of yes/no answers to explanations."""

    entries: list = field(default_factory=list)

    def append(self, entry: FeedbackEntry) -> None:
        self.entries.append(entry)

    @property
    def yes_count(self) -> int:
        return sum(1 for e in self.entries if e.helpful)

    @property
    def no_count(self) -> int:
        return sum(1 for e in self.entries if not e.helpful)

    def last_n_all_negative(self, n: int) -> bool:
        if len(self.entries) < n:
            return False
        return all(not e.helpful for e in self.entries[-n:])


_PROFILE_FIELDS = ("detail", "language", "modality_pref", "noisy_env", "low_vision", "pace_ms")


def set_preference(profile: UserProfile, field_name: str, value, *, catalog: Catalog) -> UserProfile:
    """Return the profile with one field changed, validating the new value."""
    if field_name not in _PROFILE_FIELDS:
        raise IllegalValue(f"unknown preference field {field_name!r}")
    if field_name == "detail":
        if value not in DETAIL_LEVELS:
            raise IllegalValue(f"detail must be one of {DETAIL_LEVELS}, got {value!r}")
    elif field_name == "language":
        if value not in catalog.languages:
            raise IllegalValue(f"language {value!r} is not declared in the catalog")
    elif field_name == "modality_pref":
        try:
            value = frozenset(value)
        except TypeError:
            raise IllegalValue("modality_pref must be a set of modality names") from None
        if not value or not value.issubset(set(MODALITIES)):
            raise IllegalValue(f"modality_pref must be a non-empty subset of {MODALITIES}")
    elif field_name in ("noisy_env", "low_vision"):
        if not isinstance(value, bool):
            raise IllegalValue(f"{field_name} must be a boolean")
    elif field_name == "pace_ms":
        if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= MAX_PACE_MS:
            raise IllegalValue(f"pace_ms must be an integer in [0, {MAX_PACE_MS}]")
    return replace(profile, **{field_name: value})


def effective_policy(profile: UserProfile) -> Policy:
    """Derive the rendering policy from the profile.

    A noisy environment forces visual output and drops the audio hint;
    low vision adds the audio-script hint when the environment allows it.
    """
    modality = set(profile.modality_pref) or {VISUAL}
    if profile.low_vision:
        modality.add(AUDIO_SCRIPT)
    if profile.noisy_env:
        modality.add(VISUAL)
        modality.discard(AUDIO_SCRIPT)
    return Policy(
        detail=profile.detail,
        language=profile.language,
        modality=frozenset(modality),
        pace_ms=profile.pace_ms,
    )


def record_feedback(
    ledger: FeedbackLedger,
    message_id: str,
    helpful: bool,
    *,
    known_ids,
    timestamp: float = 0.0,
) -> FeedbackLedger:
    """Append one feedback entry; the message must have been emitted."""
    if message_id not in known_ids:
        raise UnknownMessage(message_id)
    ledger.append(FeedbackEntry(message_id=message_id, helpful=bool(helpful), timestamp=timestamp))
    return ledger


def auto_adjust(ledger: FeedbackLedger, profile: UserProfile) -> UserProfile:
    """Lower the detail one step after three consecutive negative answers."""
    if not ledger.last_n_all_negative(3):
        return profile
    lowered = lower_detail(profile.detail)
    if lowered == profile.detail:
        return profile
    return replace(profile, detail=lowered)


class ProfileStore:
    """Persists one profile per user as JSON, plus a feedback JSONL log."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.profiles_dir = self.data_dir / "profiles"

    def profile_path(self, user_id: str) -> Path:
        return self.profiles_dir / f"{user_id}.json"

    def save(self, profile: UserProfile) -> Path:
        self.profiles_dir.mkdir(parents=True, exist_ok=True)
        path = self.profile_path(profile.user_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(profile.to_dict(), indent=2, ensure_ascii=False) + "\n", "utf-8")
        tmp.replace(path)
        return path

    def load(self, user_id: str) -> UserProfile | None:
        path = self.profile_path(user_id)
        if not path.exists():
            return None
        raw = json.loads(path.read_text("utf-8"))
        return UserProfile(
            user_id=raw.get("user_id", user_id),
            detail=raw.get("detail", "standard"),
            language=raw.get("language", "en"),
            modality_pref=frozenset(raw.get("modality_pref", [VISUAL])),
            noisy_env=bool(raw.get("noisy_env", False)),
            low_vision=bool(raw.get("low_vision", False)),
            pace_ms=int(raw.get("pace_ms", 0)),
        )

    def append_feedback(self, entry: FeedbackEntry) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)
        line = json.dumps(
            {"message_id": entry.message_id, "helpful": entry.helpful, "timestamp": entry.timestamp},
            ensure_ascii=False,
        )
        with (self.data_dir / "feedback.jsonl").open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")

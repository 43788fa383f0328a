import json

import pytest

from pictobridge.adapt import (
    FeedbackLedger,
    ProfileStore,
    UserProfile,
    auto_adjust,
    effective_policy,
    record_feedback,
    set_preference,
)
from pictobridge.composer import AUDIO_SCRIPT, VISUAL
from pictobridge.errors import IllegalValue, UnknownMessage


def test_set_preference_detail(catalog):
    p = set_preference(UserProfile(), "detail", "expert", catalog=catalog)
    assert p.detail == "expert"
    assert p.language == "en"  # untouched


def test_set_preference_language(catalog):
    p = set_preference(UserProfile(), "language", "es", catalog=catalog)
    assert p.language == "es"


def test_set_preference_pace_bound(catalog):
    with pytest.raises(IllegalValue):
        set_preference(UserProfile(), "pace_ms", 99999999, catalog=catalog)


def test_set_preference_rejects_bad_values(catalog):
    with pytest.raises(IllegalValue):
        set_preference(UserProfile(), "detail", "verbose", catalog=catalog)
    with pytest.raises(IllegalValue):
        set_preference(UserProfile(), "language", "xx", catalog=catalog)
    with pytest.raises(IllegalValue):
        set_preference(UserProfile(), "noisy_env", "yes", catalog=catalog)
    with pytest.raises(IllegalValue):
        set_preference(UserProfile(), "modality_pref", set(), catalog=catalog)
    with pytest.raises(IllegalValue):
        set_preference(UserProfile(), "flux", 1, catalog=catalog)


def test_default_policy():
    policy = effective_policy(UserProfile())
    assert policy.modality == frozenset({VISUAL})
    assert policy.detail == "standard"


def test_noisy_env_displays_not_speaks():
    policy = effective_policy(UserProfile(noisy_env=True, low_vision=True))
    assert VISUAL in policy.modality
    assert AUDIO_SCRIPT not in policy.modality


def test_low_vision_adds_audio():
    policy = effective_policy(UserProfile(low_vision=True, noisy_env=False))
    assert AUDIO_SCRIPT in policy.modality


def test_effective_policy_pure():
    p = UserProfile(detail="expert", noisy_env=True, pace_ms=500)
    assert effective_policy(p) == effective_policy(UserProfile(detail="expert", noisy_env=True, pace_ms=500))


def test_record_feedback_counts():
    ledger = FeedbackLedger()
    record_feedback(ledger, "m-1", True, known_ids={"m-1", "m-2"})
    assert (ledger.yes_count, ledger.no_count) == (1, 0)
    record_feedback(ledger, "m-2", False, known_ids={"m-1", "m-2"})
    assert ledger.yes_count + ledger.no_count == 2 == len(ledger.entries)


def test_record_feedback_unknown_message():
    with pytest.raises(UnknownMessage):
        record_feedback(FeedbackLedger(), "ghost", True, known_ids={"m-1"})


def test_ledger_append_only_conservation():
    import random

    rng = random.Random(7)
    ledger = FeedbackLedger()
    seen = []
    for i in range(50):
        helpful = rng.random() < 0.5
        record_feedback(ledger, f"m-{i}", helpful, known_ids={f"m-{i}"})
        seen.append(helpful)
        assert len(ledger.entries) == i + 1
        assert ledger.yes_count == sum(seen)
        assert ledger.yes_count + ledger.no_count == len(ledger.entries)
        assert [e.helpful for e in ledger.entries] == seen  # nothing mutated


def _ledger(*answers):
    ledger = FeedbackLedger()
    for i, helpful in enumerate(answers):
        record_feedback(ledger, f"m-{i}", helpful, known_ids={f"m-{i}"})
    return ledger


def test_auto_adjust_three_negatives():
    # oracle: hand-simulated rule on the ledger
    p = auto_adjust(_ledger(False, False, False), UserProfile(detail="expert"))
    assert p.detail == "standard"


def test_auto_adjust_not_triggered():
    p = auto_adjust(_ledger(False, False, True), UserProfile(detail="expert"))
    assert p.detail == "expert"


def test_auto_adjust_floor():
    p = auto_adjust(_ledger(False, False, False), UserProfile(detail="basic"))
    assert p.detail == "basic"


def test_auto_adjust_never_raises_or_touches_other_fields():
    before = UserProfile(detail="standard", language="es", low_vision=True)
    after = auto_adjust(_ledger(False, False, False), before)
    assert after.detail == "basic"
    assert after.language == before.language
    assert after.modality_pref == before.modality_pref


def test_profile_store_round_trip(tmp_path):
    store = ProfileStore(tmp_path)
    profile = UserProfile(user_id="u1", detail="expert", language="es", pace_ms=250)
    path = store.save(profile)
    assert json.loads(path.read_text("utf-8"))["detail"] == "expert"
    assert store.load("u1") == profile
    assert store.load("missing") is None


def test_profile_store_feedback_jsonl(tmp_path):
    from pictobridge.adapt import FeedbackEntry

    store = ProfileStore(tmp_path)
    store.append_feedback(FeedbackEntry("m-1", True, 1.5))
    store.append_feedback(FeedbackEntry("m-2", False, 2.5))
    lines = (tmp_path / "feedback.jsonl").read_text("utf-8").splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0]) == {"message_id": "m-1", "helpful": True, "timestamp": 1.5}

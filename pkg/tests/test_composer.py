import pytest

from pictobridge.adapt import UserProfile, effective_policy
from pictobridge.composer import (
    DETAIL_LEVELS,
    PICTOGRAM_ONLY,
    ExplanationMessage,
    lower_detail,
    word_count,
)
from pictobridge.errors import MissingTemplate, UnknownConcept, UnknownLanguage
from pictobridge.mapper import EVENT_TYPES, RobotEvent


def policy_at(detail):
    return effective_policy(UserProfile(detail=detail))


def turn_event(seq=1, tick=5):
    return RobotEvent(seq=seq, sim_time=tick, type="TURN", cause="obstacle", location=(4, 6))


def compose_turn(composer, mapper, detail):
    event = turn_event()
    return composer.compose(mapper.map_event(event), event, policy_at(detail))


def test_turn_basic_golden(composer, mapper):
    msg = compose_turn(composer, mapper, "basic")
    assert msg.text["en"] == "I’m turning."


def test_turn_standard_golden(composer, mapper):
    msg = compose_turn(composer, mapper, "standard")
    assert msg.text["en"] == "Robot turns. There is an object blocking the path."


def test_turn_expert_contains_golden_sentence(composer, mapper):
    msg = compose_turn(composer, mapper, "expert")
    assert "Executing evasive maneuver using the DWB planner." in msg.text["en"]


def representative_event(type_):
    kw = {}
    if type_ == "TURN":
        kw["cause"] = "obstacle"
    if type_ == "PLAN_CHANGED":
        kw["cause"] = "replan"
    if type_ == "STOP":
        kw["cause"] = "person"
    if type_ == "BATTERY_LOW":
        kw["cause"] = "battery"
    if type_ in ("PICK", "PLACE"):
        kw["object"] = "box"
    if type_ == "GOAL_SET":
        kw["goal"] = "charging-zone"
        kw["cause"] = "battery"
    if type_ == "GOAL_REACHED":
        kw["goal"] = "loading-zone"
    return RobotEvent(seq=1, sim_time=1, type=type_, **kw)


def plain_event(type_):
    kw = {}
    if type_ == "TURN":
        kw["cause"] = "obstacle"
    if type_ == "PLAN_CHANGED":
        kw["cause"] = "replan"
    if type_ in ("PICK", "PLACE"):
        kw["object"] = "box"
    if type_ == "GOAL_SET":
        kw["goal"] = "warehouse"
    if type_ == "GOAL_REACHED":
        kw["goal"] = "warehouse"
    return RobotEvent(seq=1, sim_time=1, type=type_, **kw)


@pytest.mark.parametrize("event_factory", [representative_event, plain_event])
def test_template_totality_and_monotonicity(composer, mapper, catalog, event_factory):
    # all event-type x detail x language renderings succeed, detail word
    # counts never shrink, and pictograms align with concepts
    for type_ in EVENT_TYPES:
        event = event_factory(type_)
        seq = mapper.map_event(event)
        per_lang = {lang: [] for lang in catalog.languages}
        for detail in DETAIL_LEVELS:
            msg = composer.compose(seq, event, policy_at(detail))
            assert len(msg.pictograms) == len(msg.concepts.concepts)
            for lang in catalog.languages:
                assert msg.text[lang]
                per_lang[lang].append(word_count(msg.text[lang]))
        for lang, counts in per_lang.items():
            assert counts[0] <= counts[1] <= counts[2], (type_, lang, counts)


def test_language_invariance(composer, mapper):
    event = turn_event()
    seq = mapper.map_event(event)
    en = composer.compose(seq, event, effective_policy(UserProfile(language="en")))
    es = composer.compose(seq, event, effective_policy(UserProfile(language="es")))
    assert en.concepts == es.concepts
    assert [p.catalog_id for p in en.pictograms] == [p.catalog_id for p in es.pictograms]
    assert en.text == es.text  # all declared languages always rendered


def test_text_contains_every_declared_language(composer, mapper, catalog):
    msg = compose_turn(composer, mapper, "standard")
    assert set(msg.text) == set(catalog.languages)


def test_missing_template_raises(composer, mapper, policy):
    event = RobotEvent(seq=1, sim_time=1, type="TURN", cause="obstacle")
    seq = mapper.map_event(event)
    bogus = RobotEvent(seq=1, sim_time=1, type="NOPE", cause="obstacle")
    with pytest.raises(MissingTemplate):
        composer.compose(seq, bogus, policy)


def test_confirm_language_golden(composer, policy):
    msg = composer.confirm_language("en", policy)
    assert msg.text["en"] == "Language set to English. I am avoiding humans to maintain safety."
    assert msg.source == "system"


def test_confirm_language_concepts_invariant(composer, policy):
    en = composer.confirm_language("en", policy)
    es = composer.confirm_language("es", policy)
    assert en.concepts == es.concepts


def test_confirm_language_unknown(composer, policy):
    with pytest.raises(UnknownLanguage):
        composer.confirm_language("xx", policy)


def test_relevance_clause_golden(composer):
    clause = composer.relevance_clause("loading-zone", "en")
    assert clause == "I’m choosing this route so we can get to your destination faster."


def test_relevance_clause_same_template_across_languages(composer):
    en = composer.relevance_clause("loading-zone", "en")
    es = composer.relevance_clause("loading-zone", "es")
    assert en and es and en != es


def test_relevance_clause_unknown_concept(composer):
    with pytest.raises(UnknownConcept):
        composer.relevance_clause("no-such", "en")


def test_reformulate_simpler_steps_down(composer, mapper):
    event = turn_event()
    msg = composer.compose(mapper.map_event(event), event, policy_at("expert"))
    simpler = composer.reformulate(msg, "simpler", event=event, new_id="m-9")
    assert simpler.detail == "standard"
    assert simpler.concepts == msg.concepts
    assert simpler.text["en"] == "Robot turns. There is an object blocking the path."


def test_reformulate_simpler_floor(composer, mapper):
    event = turn_event()
    msg = composer.compose(mapper.map_event(event), event, policy_at("basic"))
    assert composer.reformulate(msg, "simpler", event=event) is msg


def test_reformulate_images(composer, mapper):
    event = turn_event()
    msg = composer.compose(mapper.map_event(event), event, policy_at("standard"))
    images = composer.reformulate(msg, "images")
    assert images.modality == frozenset({PICTOGRAM_ONLY})
    assert images.pictograms == msg.pictograms
    assert images.text == msg.text


def test_lower_detail_order():
    assert lower_detail("expert") == "standard"
    assert lower_detail("standard") == "basic"
    assert lower_detail("basic") == "basic"


def test_message_round_trip(composer, mapper):
    event = turn_event()
    msg = composer.compose(mapper.map_event(event), event, policy_at("standard"), msg_id="m-3")
    again = ExplanationMessage.from_dict(msg.to_dict())
    assert again.to_dict() == msg.to_dict()


def test_recall_clause_mentions_tick(composer):
    assert "12" in composer.recall_clause(12, "en")
    assert "12" in composer.recall_clause(12, "es")

"""The bidirectional dialogue loop: consumes robot events and user intents,
keeps the causal context and episode history, and produces explanation
messages (robot-initiated, user-initiated replies, and system messages).

All state lives in one Engine instance and must only be mutated from a
single logical loop; callers on other threads go through the runtime's
serialized inbox. Emitted messages are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .adapt import (
    FeedbackLedger,
    UserProfile,
    auto_adjust,
    effective_policy,
    record_feedback,
    set_preference,
)
from .composer import Composer, ExplanationMessage
from .errors import IllegalValue, StaleEvent, UnknownTerm, UnknownToken
from .lexicon import Catalog
from .mapper import ConceptSequence, EventMapper, RobotEvent

INTENT_TOKENS = (
    "why",
    "stop",
    "go",
    "wait",
    "goal",
    "set-goal",
    "repeat",
    "summary",
    "step-by-step",
    "images",
    "simpler",
    "yes",
    "no",
    "define",
    "language",
)

_ARG_REQUIRED = ("set-goal", "define", "language")

# event types that still get narrated when the user prefers summaries
_ALWAYS_NARRATED = ("PLAN_CHANGED", "GOAL_SET", "BATTERY_LOW")

SUMMARY_LENGTH = 5

_WHY_CONCEPTS = {
    "person": ("robot", "wait", "person"),
    "obstacle": ("object", "obstacle", "path"),
    "battery": ("robot", "battery", "charging-zone"),
    "command": ("person", "command", "robot"),
    "replan": ("robot", "plan", "path"),
    None: ("robot", "path", "goal"),
}


@dataclass(frozen=True)
class Intent:
    token: str
    arg: str | None = None

    def to_dict(self) -> dict:
        return {"token": self.token, "arg": self.arg}


def parse_token(payload: str) -> Intent:
    """Parse a wire token like ``why`` or ``define:SLAM`` into an Intent."""
    if not isinstance(payload, str) or not payload or any(c.isspace() for c in payload):
        raise UnknownToken(repr(payload))
    token, _, arg = payload.partition(":")
    arg = arg or None
    if token not in INTENT_TOKENS:
        raise UnknownToken(token)
    if token in _ARG_REQUIRED and arg is None:
        raise UnknownToken(f"{token} requires an argument")
    return Intent(token=token, arg=arg)


def format_token(intent: Intent) -> str:
    return intent.token if intent.arg is None else f"{intent.token}:{intent.arg}"


@dataclass(frozen=True)
class RobotCommand:
    """A command the dialogue forwards to the robot over the bus."""

    kind: str  # stop | go | wait | set-goal
    arg: str | None = None

    def payload(self) -> str:
        return self.kind if self.arg is None else f"{self.kind}:{self.arg}"


@dataclass(frozen=True)
class Emission:
    messages: tuple = ()
    commands: tuple = ()


@dataclass
class Episode:
    event: RobotEvent
    message: ExplanationMessage
    goal_at_time: str | None


class Engine:
    """Dialogue state machine over the mapper and composer."""

    def __init__(
        self,
        catalog: Catalog,
        mapper: EventMapper,
        composer: Composer,
        profile: UserProfile | None = None,
        clock=None,
        auto_adjust_enabled: bool = True,
    ):
        self.catalog = catalog
        self.mapper = mapper
        self.composer = composer
        self.profile = profile or UserProfile()
        self.ledger = FeedbackLedger()
        self.clock = clock or (lambda: 0.0)
        self.auto_adjust_enabled = auto_adjust_enabled
        self.mode = "step-by-step"
        self.history: list[Episode] = []
        self.last_message: ExplanationMessage | None = None
        self.current_goal: str | None = None
        self.carried: str | None = None
        self.transcript: list[dict] = []
        self._last_seq = 0
        self._msg_counter = 0
        self._emitted_ids: set[str] = set()
        self._last_robot_emit: float | None = None
        self._stations = tuple(
            cid for cid in catalog.concept_ids() if catalog.concept(cid).category == "goal"
        )

    # -- small helpers -------------------------------------------------------

    @property
    def policy(self):
        return effective_policy(self.profile)

    def _next_id(self) -> str:
        self._msg_counter += 1
        return f"m-{self._msg_counter}"

    def _emit(self, msg: ExplanationMessage) -> ExplanationMessage:
        self.transcript.append({"type": "message", **msg.to_dict()})
        self._emitted_ids.add(msg.id)
        self.last_message = msg
        return msg

    def _reply(self, key, concepts, *, source="user-initiated", provenance=None,
               concept_slots=None, literal_slots=None, cause_concept=None) -> ExplanationMessage:
        seq = ConceptSequence(concepts=tuple(concepts), cause_concept=cause_concept)
        return self.composer.render_reply(
            key,
            seq,
            self.policy,
            msg_id=self._next_id(),
            source=source,
            provenance=provenance,
            concept_slots=concept_slots,
            literal_slots=literal_slots,
        )

    def _no_context(self) -> ExplanationMessage:
        return self._reply("NO_CONTEXT", ("robot", "no"), source="system")

    def clarify(self) -> ExplanationMessage:
        return self._reply("CLARIFY", ("robot", "why"), source="system")

    # -- robot events ---------------------------------------------------------

    def recall_similar(self, event: RobotEvent) -> dict | None:
        """Per-language prior-experience clause when this event type happened before."""
        for episode in reversed(self.history):
            if episode.event.type == event.type:
                tick = episode.event.sim_time
                return {lang: self.composer.recall_clause(tick, lang) for lang in self.catalog.languages}
        return None

    def on_robot_event(self, event: RobotEvent) -> Emission:
        if event.seq <= self._last_seq:
            raise StaleEvent(f"seq {event.seq} after {self._last_seq}")
        self._last_seq = event.seq

        seq = self.mapper.map_event(event)
        policy = self.policy
        recall = None
        if policy.detail in ("standard", "expert"):
            recall = self.recall_similar(event)
        relevance = None
        if event.type == "PLAN_CHANGED" and self.current_goal is not None and policy.detail != "basic":
            relevance = {
                lang: self.composer.relevance_clause(self.current_goal, lang)
                for lang in self.catalog.languages
            }

        # state updates derived from the event stream
        if event.type == "GOAL_SET":
            self.current_goal = event.goal
        elif event.type == "GOAL_REACHED":
            self.current_goal = None
        elif event.type == "PICK":
            self.carried = event.object
        elif event.type == "PLACE":
            self.carried = None

        message = self.composer.compose(
            seq,
            event,
            policy,
            msg_id=self._next_id(),
            source="robot-initiated",
            recall=recall,
            relevance=relevance,
        )
        self.history.append(Episode(event=event, message=message, goal_at_time=self.current_goal))

        narrate = self.mode == "step-by-step" or event.type in _ALWAYS_NARRATED
        if narrate and policy.pace_ms > 0:
            now = self.clock()
            if self._last_robot_emit is not None and (now - self._last_robot_emit) * 1000.0 < policy.pace_ms:
                narrate = False
        if not narrate:
            return Emission()
        self._last_robot_emit = self.clock()
        return Emission(messages=(self._emit(message),))

    # -- user intents ----------------------------------------------------------

    def handle_payload(self, payload: str, tick: int = 0) -> Emission:
        """Interpret one wire token; unknown tokens become a clarification."""
        try:
            intent = parse_token(payload)
        except UnknownToken:
            return Emission(messages=(self._emit(self.clarify()),))
        return self.handle_intent(intent, tick=tick)

    def handle_intent(self, intent: Intent, tick: int = 0) -> Emission:
        if intent.token not in INTENT_TOKENS:
            raise UnknownToken(intent.token)
        self.transcript.append({"type": "intent", "tick": tick, **intent.to_dict()})
        handler = getattr(self, f"_intent_{intent.token.replace('-', '_')}")
        return handler(intent)

    def _intent_why(self, intent: Intent) -> Emission:
        if not self.history:
            return Emission(messages=(self._emit(self._no_context()),))
        episode = self.history[-1]
        cause = episode.event.cause
        concepts = _WHY_CONCEPTS.get(cause, _WHY_CONCEPTS[None])
        cause_concept = self.mapper.cause_concept_for(cause)
        key = f"WHY@{cause if cause in _WHY_CONCEPTS and cause else 'none'}"
        msg = self._reply(
            key,
            concepts,
            provenance=episode.event.seq,
            cause_concept=cause_concept if cause_concept in concepts else None,
        )
        return Emission(messages=(self._emit(msg),))

    def _intent_goal(self, intent: Intent) -> Emission:
        if self.current_goal is None:
            msg = self._reply("GOAL_QUERY_NONE", ("robot", "goal", "no"))
        elif self.carried is not None:
            msg = self._reply(
                "GOAL_QUERY_CARRY",
                ("robot", "carry", self.carried, self.current_goal),
                concept_slots={"object": self.carried, "goal": self.current_goal},
            )
        else:
            msg = self._reply(
                "GOAL_QUERY",
                ("robot", "goal", self.current_goal),
                concept_slots={"goal": self.current_goal},
            )
        return Emission(messages=(self._emit(msg),))

    def _intent_stop(self, intent: Intent) -> Emission:
        msg = self._reply("ACK_STOP", ("robot", "stop"), source="system")
        return Emission(messages=(self._emit(msg),), commands=(RobotCommand("stop"),))

    def _intent_go(self, intent: Intent) -> Emission:
        msg = self._reply("ACK_GO", ("robot", "go"), source="system")
        return Emission(messages=(self._emit(msg),), commands=(RobotCommand("go"),))

    def _intent_wait(self, intent: Intent) -> Emission:
        msg = self._reply("ACK_WAIT", ("robot", "wait"), source="system")
        return Emission(messages=(self._emit(msg),), commands=(RobotCommand("wait"),))

    def _intent_set_goal(self, intent: Intent) -> Emission:
        station = intent.arg
        if station not in self._stations:
            return Emission(messages=(self._emit(self.clarify()),))
        msg = self._reply("ACK_SET_GOAL", ("robot", "go", station), source="system")
        return Emission(messages=(self._emit(msg),), commands=(RobotCommand("set-goal", station),))

    def _intent_repeat(self, intent: Intent) -> Emission:
        if self.last_message is None:
            return Emission(messages=(self._emit(self._no_context()),))
        return Emission(messages=(self._emit(self.last_message),))

    def _intent_summary(self, intent: Intent) -> Emission:
        self.mode = "summary-on-demand"
        return Emission(messages=(self._emit(self.summarize(SUMMARY_LENGTH)),))

    def _intent_step_by_step(self, intent: Intent) -> Emission:
        self.mode = "step-by-step"
        msg = self._reply("MODE_STEP", ("robot", "path"), source="system")
        return Emission(messages=(self._emit(msg),))

    def _intent_images(self, intent: Intent) -> Emission:
        if self.last_message is None:
            return Emission(messages=(self._emit(self._no_context()),))
        msg = self.composer.reformulate(self.last_message, "images")
        return Emission(messages=(self._emit(msg),))

    def _intent_simpler(self, intent: Intent) -> Emission:
        if self.last_message is None:
            return Emission(messages=(self._emit(self._no_context()),))
        msg = self.last_message
        event = None
        if msg.provenance is not None:
            for episode in reversed(self.history):
                if episode.event.seq == msg.provenance:
                    event = episode.event
                    break
        reformulated = self.composer.reformulate(msg, "simpler", event=event, new_id=self._next_id())
        return Emission(messages=(self._emit(reformulated),))

    def _record_feedback(self, message_id: str, helpful: bool) -> ExplanationMessage | None:
        """Append to the ledger; returns an ADJUSTED prompt when the
        negative streak lowered the detail level."""
        record_feedback(
            self.ledger, message_id, helpful, known_ids=self._emitted_ids, timestamp=self.clock()
        )
        if helpful or not self.auto_adjust_enabled:
            return None
        adjusted = auto_adjust(self.ledger, self.profile)
        if adjusted is self.profile or adjusted == self.profile:
            return None
        self.profile = adjusted
        return self._reply("ADJUSTED", ("robot", "why"), source="system")

    def _intent_yes(self, intent: Intent) -> Emission:
        if self.last_message is None:
            return Emission(messages=(self._emit(self._no_context()),))
        self._record_feedback(self.last_message.id, True)
        msg = self._reply("FEEDBACK_YES", ("robot", "yes"), source="system")
        return Emission(messages=(self._emit(msg),))

    def _intent_no(self, intent: Intent) -> Emission:
        if self.last_message is None:
            return Emission(messages=(self._emit(self._no_context()),))
        adjusted_prompt = self._record_feedback(self.last_message.id, False)
        msg = adjusted_prompt or self._reply("FEEDBACK_NO", ("robot", "no"), source="system")
        return Emission(messages=(self._emit(msg),))

    def _intent_define(self, intent: Intent) -> Emission:
        try:
            definitions = {
                lang: self.catalog.define_term(intent.arg, lang) for lang in self.catalog.languages
            }
        except UnknownTerm:
            return Emission(messages=(self._emit(self.clarify()),))
        concept = intent.arg.lower() if intent.arg.lower() in self.catalog else "robot"
        seq = ConceptSequence(concepts=(concept,))
        msg = ExplanationMessage(
            id=self._next_id(),
            source="user-initiated",
            concepts=seq,
            text=definitions,
            pictograms=[self.catalog.pictogram(c) for c in seq.concepts],
            modality=frozenset(self.policy.modality),
            detail=self.policy.detail,
        )
        return Emission(messages=(self._emit(msg),))

    def _intent_language(self, intent: Intent) -> Emission:
        try:
            self.profile = set_preference(self.profile, "language", intent.arg, catalog=self.catalog)
        except IllegalValue:
            return Emission(messages=(self._emit(self.clarify()),))
        msg = self.composer.confirm_language(intent.arg, self.policy, msg_id=self._next_id())
        return Emission(messages=(self._emit(msg),))

    # -- summaries ----------------------------------------------------------

    def summarize(self, k: int) -> ExplanationMessage:
        if not self.history:
            return self._no_context()
        episodes = self.history[-min(k, len(self.history)):]
        actions = tuple(self.mapper.action_concept(ep.event.type) for ep in episodes)
        labels = {
            lang: ", ".join(self.catalog.label(a, lang) for a in actions)
            for lang in self.catalog.languages
        }
        seq = ConceptSequence(concepts=actions)
        text = {}
        for lang in self.catalog.languages:
            template = self.composer._lookup("SUMMARY", None, "any", lang)
            text[lang] = template.format(actions=labels[lang])
        return ExplanationMessage(
            id=self._next_id(),
            source="user-initiated",
            concepts=seq,
            text=text,
            pictograms=[self.catalog.pictogram(c) for c in seq.concepts],
            modality=frozenset(self.policy.modality),
            detail=self.policy.detail,
            render_key="SUMMARY",
        )

    # -- profile and feedback entry points used by the gateway ----------------

    def apply_profile_patch(self, patch: dict) -> Emission:
        """Apply a partial profile update atomically; a language change is
        confirmed with the standard system message."""
        updated = self.profile
        language_changed = False
        for field_name, value in patch.items():
            updated = set_preference(updated, field_name, value, catalog=self.catalog)
            if field_name == "language":
                language_changed = True
        self.profile = updated
        messages = []
        if language_changed:
            msg = self.composer.confirm_language(self.profile.language, self.policy, msg_id=self._next_id())
            messages.append(self._emit(msg))
        return Emission(messages=tuple(messages))

    def apply_feedback(self, message_id: str, helpful: bool) -> Emission:
        """Feedback arriving over the API; recorded in the transcript as the
        equivalent yes/no intent so history review shows it."""
        adjusted_prompt = self._record_feedback(message_id, helpful)
        self.transcript.append(
            {"type": "intent", "tick": 0, "token": "yes" if helpful else "no", "arg": message_id}
        )
        if adjusted_prompt is not None:
            return Emission(messages=(self._emit(adjusted_prompt),))
        return Emission()

    def history_entries(self, limit: int) -> list[dict]:
        if limit <= 0:
            return []
        return [dict(entry) for entry in self.transcript[-limit:]]

"""In-process publish/subscribe fabric with named, slash-prefixed topics.

Delivery contract: every subscriber of a topic receives every message
published after it subscribed, exactly once, in per-topic publish order.
Each subscriber consumes from its own bounded queue; when a queue is full
the publisher blocks (backpressure) rather than dropping messages.

External adapter contract: any process that mirrors the four declared
topics 1:1 onto a robot middleware (commands inbound on /asterics_commands
and /robot_cmd, events and explanations outbound) can replace the in-process
robot without touching the rest of the system.
"""

from __future__ import annotations

import queue
import threading
from dataclasses import dataclass

from .errors import MalformedTopic

TOPIC_COMMANDS = "/asterics_commands"
TOPIC_EVENTS = "/robot_events"
TOPIC_EXPLANATIONS = "/explanations"
TOPIC_ROBOT_CMD = "/robot_cmd"

DECLARED_TOPICS = (TOPIC_COMMANDS, TOPIC_EVENTS, TOPIC_EXPLANATIONS, TOPIC_ROBOT_CMD)

SUBSCRIBER_QUEUE_CAPACITY = 1024


def declared_topics() -> list[str]:
    """The fixed topic set that makes up the external-adapter contract."""
    return list(DECLARED_TOPICS)


def _check_topic(topic: str) -> None:
    if not isinstance(topic, str) or not topic or not topic.startswith("/") or any(c.isspace() for c in topic):
        raise MalformedTopic(repr(topic))


@dataclass(frozen=True)
class BusMessage:
    topic: str
    payload: str
    seq: int


class Subscription:
    """One subscriber's ordered view of a topic."""

    def __init__(self, bus: "MessageBus", topic: str):
        self._bus = bus
        self.topic = topic
        self._queue: queue.Queue = queue.Queue(maxsize=SUBSCRIBER_QUEUE_CAPACITY)
        self._closed = threading.Event()

    @property
    def closed(self) -> bool:
        return self._closed.is_set()

    def _deliver(self, message: BusMessage) -> None:
        # Blocks when the queue is full: backpressure is the contract,
        # dropping is not allowed.
        self._queue.put(message)

    def get(self, timeout: float | None = None) -> BusMessage:
        """Next message; raises queue.Empty on timeout."""
        if timeout is None:
            return self._queue.get()
        return self._queue.get(timeout=timeout)

    def drain(self) -> list[BusMessage]:
        """All messages currently queued, without blocking."""
        out = []
        while True:
            try:
                out.append(self._queue.get_nowait())
            except queue.Empty:
                return out

    def close(self) -> None:
        self._closed.set()
        self._bus._unsubscribe(self)

    def __iter__(self):
        while not self.closed:
            try:
                yield self.get(timeout=0.1)
            except queue.Empty:
                continue


class _Topic:
    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.seq = 0
        self.subscribers: list[Subscription] = []


class MessageBus:
    """Thread-safe topic fan-out with per-topic ordering."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._topics: dict[str, _Topic] = {}

    def _topic(self, topic: str) -> _Topic:
        _check_topic(topic)
        with self._lock:
            if topic not in self._topics:
                self._topics[topic] = _Topic()
            return self._topics[topic]

    def publish(self, topic: str, payload: str) -> int:
        """Deliver payload to all current subscribers; returns the topic seq."""
        state = self._topic(topic)
        with state.lock:
            state.seq += 1
            message = BusMessage(topic=topic, payload=payload, seq=state.seq)
            for sub in list(state.subscribers):
                if not sub.closed:
                    sub._deliver(message)
            return state.seq

    def subscribe(self, topic: str) -> Subscription:
        state = self._topic(topic)
        sub = Subscription(self, topic)
        with state.lock:
            state.subscribers.append(sub)
        return sub

    def _unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            state = self._topics.get(sub.topic)
        if state is None:
            return
        with state.lock:
            if sub in state.subscribers:
                state.subscribers.remove(sub)

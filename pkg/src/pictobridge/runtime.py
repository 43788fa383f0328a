"""Live-service assembly: the simulator ticker, the serialized dialogue
worker, and the bus bridges between them.

All dialogue state is mutated on a single worker thread fed by one inbox
queue; HTTP handlers and the ticker only enqueue work or read snapshots.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import time
from concurrent.futures import Future
from pathlib import Path

from .adapt import ProfileStore, UserProfile
from .boards import export_boards
from .bus import (
    TOPIC_COMMANDS,
    TOPIC_EVENTS,
    TOPIC_EXPLANATIONS,
    TOPIC_ROBOT_CMD,
    MessageBus,
)
from .composer import Composer
from .dialogue import Engine
from .errors import StaleEvent
from .lexicon import load_catalog
from .mapper import EventMapper, RobotEvent
from .simrobot import SimRobot, load_scenario

log = logging.getLogger(__name__)


class Runtime:
    """Owns the bus, the engine, the simulator and their threads."""

    def __init__(
        self,
        *,
        scenario: str = "warehouse",
        seed: int = 42,
        profile: UserProfile | None = None,
        auto_adjust_enabled: bool = True,
        tick_hz: float = 2.0,
        board_dir: str | Path | None = None,
        data_dir: str | Path | None = None,
        active_board: str = "interaction",
    ):
        self.catalog = load_catalog()
        self.mapper = EventMapper(self.catalog)
        self.composer = Composer(self.catalog)
        self.bus = MessageBus()
        self.sim = SimRobot(load_scenario(scenario, seed))
        self._sim_lock = threading.Lock()
        self.engine = Engine(
            self.catalog,
            self.mapper,
            self.composer,
            profile=profile,
            clock=time.monotonic,
            auto_adjust_enabled=auto_adjust_enabled,
        )
        self.tick_hz = tick_hz
        self.active_board = active_board
        self.board_dir = Path(board_dir) if board_dir else None
        self.store = ProfileStore(data_dir) if data_dir else None
        self._inbox: queue.Queue = queue.Queue()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._ticking = False

    # -- lifecycle -----------------------------------------------------------

    def ensure_boards(self, langs: list[str] | None = None) -> list[Path]:
        if self.board_dir is None:
            raise ValueError("runtime has no board directory configured")
        return export_boards(self.board_dir, langs or list(self.catalog.languages), self.catalog)

    def start(self, *, ticking: bool = True) -> None:
        if self.store is not None:
            saved = self.store.load(self.engine.profile.user_id)
            if saved is not None:
                self.engine.profile = saved
        self._ticking = ticking
        self._stop.clear()
        workers = [
            ("dialogue", self._dialogue_loop),
            ("commands-bridge", self._commands_bridge),
            ("events-bridge", self._events_bridge),
        ]
        if ticking:
            workers.append(("ticker", self._ticker_loop))
        for name, target in workers:
            thread = threading.Thread(target=target, name=f"pictobridge-{name}", daemon=True)
            thread.start()
            self._threads.append(thread)

    def stop(self) -> None:
        self._stop.set()
        for thread in self._threads:
            thread.join(timeout=2.0)
        self._threads.clear()

    # -- thread bodies ---------------------------------------------------------

    def _dialogue_loop(self) -> None:
        while not self._stop.is_set():
            try:
                item = self._inbox.get(timeout=0.1)
            except queue.Empty:
                continue
            kind = item[0]
            try:
                if kind == "payload":
                    emission = self.engine.handle_payload(item[1], tick=self.sim.world.tick)
                    self._route(emission)
                elif kind == "event":
                    try:
                        emission = self.engine.on_robot_event(item[1])
                    except StaleEvent as exc:
                        log.warning("dropping stale event: %s", exc)
                        continue
                    self._route(emission)
                elif kind == "call":
                    fn, fut = item[1], item[2]
                    if not fut.set_running_or_notify_cancel():
                        continue
                    try:
                        fut.set_result(fn(self.engine))
                    except Exception as exc:  # surfaced to the HTTP caller
                        fut.set_exception(exc)
            except Exception:
                log.exception("dialogue worker failed on %r", kind)

    def _route(self, emission) -> None:
        for command in emission.commands:
            self.bus.publish(TOPIC_ROBOT_CMD, command.payload())
        for message in emission.messages:
            self.bus.publish(TOPIC_EXPLANATIONS, json.dumps(message.to_dict(), ensure_ascii=False))

    def _commands_bridge(self) -> None:
        sub = self.bus.subscribe(TOPIC_COMMANDS)
        try:
            while not self._stop.is_set():
                try:
                    msg = sub.get(timeout=0.1)
                except queue.Empty:
                    continue
                self._inbox.put(("payload", msg.payload))
        finally:
            sub.close()

    def _events_bridge(self) -> None:
        sub = self.bus.subscribe(TOPIC_EVENTS)
        try:
            while not self._stop.is_set():
                try:
                    msg = sub.get(timeout=0.1)
                except queue.Empty:
                    continue
                self._inbox.put(("event", RobotEvent.from_dict(json.loads(msg.payload))))
        finally:
            sub.close()

    def _ticker_loop(self) -> None:
        period = 1.0 / self.tick_hz
        sub = self.bus.subscribe(TOPIC_ROBOT_CMD)
        try:
            while not self._stop.is_set():
                started = time.monotonic()
                self.tick_once(sub)
                elapsed = time.monotonic() - started
                self._stop.wait(max(0.0, period - elapsed))
        finally:
            sub.close()

    def tick_once(self, cmd_sub=None) -> list:
        """Apply pending robot commands and advance the world one tick."""
        with self._sim_lock:
            if cmd_sub is not None:
                for msg in cmd_sub.drain():
                    kind, _, arg = msg.payload.partition(":")
                    try:
                        self.sim.apply_command(kind, arg or None)
                    except Exception as exc:
                        log.warning("rejected robot command %r: %s", msg.payload, exc)
            events = self.sim.step()
        for event in events:
            self.bus.publish(TOPIC_EVENTS, json.dumps(event.to_dict(), ensure_ascii=False))
        return events

    # -- accessors for the gateway ----------------------------------------------

    def submit(self, fn) -> Future:
        """Run fn(engine) on the dialogue thread; returns a Future."""
        fut: Future = Future()
        self._inbox.put(("call", fn, fut))
        return fut

    def submit_routed(self, fn) -> Future:
        """Like submit, but fn returns (emission, result); the emission's
        messages and commands go out on the bus in worker order."""

        def wrapper(engine):
            emission, result = fn(engine)
            self._route(emission)
            return result

        return self.submit(wrapper)

    def snapshot(self) -> dict:
        with self._sim_lock:
            return self.sim.snapshot()

    def publish_command(self, token: str) -> int:
        return self.bus.publish(TOPIC_COMMANDS, token)

    def save_profile(self) -> None:
        if self.store is not None:
            self.store.save(self.engine.profile)

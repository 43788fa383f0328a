"""Deterministic grid-world robot: navigates between stations, avoids a
static obstacle and a patrolling person, picks and places one object, and
narrates everything it does as robot events.

The world is a 4-connected integer grid stepped by discrete ticks.
(scenario, seed, script) fully determine every event, byte for byte.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from random import Random

from .errors import InvalidTarget, ScriptError, UnknownScenario, UnknownStation
from .mapper import RobotEvent

# neighbor order is part of the determinism contract
HEADINGS = ("N", "E", "S", "W")
DELTAS = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}

BATTERY_THRESHOLD = 20
CHARGE_PER_TICK = 5
WAIT_TICKS = 5


@dataclass
class World:
    width: int
    height: int
    obstacles: frozenset
    person_path: tuple
    person_idx: int
    stations: dict
    objects: dict  # object id -> floor cell, or None while carried
    robot: tuple
    heading: str
    carried: str | None
    battery: int
    goal: str | None
    tick: int
    mission: tuple
    scenario: str
    seed: int

    @property
    def person(self) -> tuple:
        return self.person_path[self.person_idx]

    def in_bounds(self, cell: tuple) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height


def _load_scenario_file(name: str) -> dict:
    res = resources.files("pictobridge.data.scenarios").joinpath(f"{name}.json")
    if not res.is_file():
        raise UnknownScenario(name)
    return json.loads(res.read_text("utf-8"))


def load_scenario(name: str, seed: int, path: str | Path | None = None) -> World:
    """Build the deterministic world for (name, seed).

    The seed affects only the person's patrol phase and which of the
    candidate cells holds the route obstacle; the layout is otherwise fixed.
    """
    if path is not None:
        raw = json.loads(Path(path).read_text("utf-8"))
    else:
        raw = _load_scenario_file(name)
    rng = Random(seed)
    obstacles = {tuple(c) for c in raw.get("obstacles", [])}
    candidates = [tuple(c) for c in raw.get("obstacle_candidates", [])]
    if candidates:
        obstacles.add(candidates[rng.randrange(len(candidates))])
    person_path = tuple(tuple(c) for c in raw["person_path"])
    person_idx = rng.randrange(len(person_path))
    return World(
        width=int(raw["width"]),
        height=int(raw["height"]),
        obstacles=frozenset(obstacles),
        person_path=person_path,
        person_idx=person_idx,
        stations={k: tuple(v) for k, v in raw["stations"].items()},
        objects={k: tuple(v) for k, v in raw.get("objects", {}).items()},
        robot=tuple(raw["robot_start"]),
        heading=str(raw.get("robot_heading", "E")),
        carried=None,
        battery=int(raw.get("battery", 100)),
        goal=None,
        tick=0,
        mission=tuple(tuple(step) for step in raw.get("mission", [])),
        scenario=str(raw.get("name", name)),
        seed=seed,
    )


def plan_path(world: World, target: tuple) -> list:
    """Shortest 4-connected path to target via BFS with fixed N,E,S,W
    neighbor order. Excludes the start cell; empty when unreachable or
    already there."""
    target = tuple(target)
    if not world.in_bounds(target) or target in world.obstacles:
        raise InvalidTarget(str(target))
    start = world.robot
    if start == target:
        return []
    parents: dict = {start: None}
    frontier = deque([start])
    while frontier:
        cell = frontier.popleft()
        if cell == target:
            break
        x, y = cell
        for heading in HEADINGS:
            dx, dy = DELTAS[heading]
            nxt = (x + dx, y + dy)
            if world.in_bounds(nxt) and nxt not in world.obstacles and nxt not in parents:
                parents[nxt] = cell
                frontier.append(nxt)
    if target not in parents:
        return []
    path = []
    cell = target
    while cell != start:
        path.append(cell)
        cell = parents[cell]
    path.reverse()
    return path


def _heading_between(a: tuple, b: tuple) -> str:
    dx, dy = b[0] - a[0], b[1] - a[1]
    for heading, delta in DELTAS.items():
        if delta == (dx, dy):
            return heading
    raise ValueError(f"cells {a} and {b} are not adjacent")


def _adjacent_to_obstacle(cell: tuple, world: World) -> bool:
    x, y = cell
    return any((x + dx, y + dy) in world.obstacles for dx, dy in DELTAS.values())


class SimRobot:
    """Steps one world forward and applies user commands in tick order."""

    def __init__(self, world: World):
        self.world = world
        self.plan: list = []
        self.frozen = False
        self.wait_until: int | None = None
        self.person_blocked = False
        self.charge_mode = False
        self.saved_goal: str | None = None
        self.mission_idx = 0
        self._seq = 0
        self._pending: list = []

    # -- commands -------------------------------------------------------------

    def apply_command(self, kind: str, arg: str | None = None) -> None:
        """Queue a command for the next tick; station names are validated
        immediately so a bad goal never reaches the motion loop."""
        if kind not in ("stop", "go", "wait", "set-goal"):
            raise ValueError(f"unknown robot command {kind!r}")
        if kind == "set-goal" and arg not in self.world.stations:
            raise UnknownStation(str(arg))
        self._pending.append((kind, arg))

    def snapshot(self) -> dict:
        w = self.world
        return {
            "tick": w.tick,
            "pose": list(w.robot),
            "heading": w.heading,
            "goal": w.goal,
            "battery": w.battery,
            "carried": w.carried,
            "person": list(w.person),
        }

    # -- events ---------------------------------------------------------------

    def _event(self, type_: str, *, cause=None, obj=None, goal=None) -> RobotEvent:
        self._seq += 1
        return RobotEvent(
            seq=self._seq,
            sim_time=self.world.tick,
            type=type_,
            cause=cause,
            object=obj,
            goal=goal,
            location=self.world.robot,
        )

    def _set_goal(self, station: str, cause: str | None, events: list) -> None:
        w = self.world
        w.goal = station
        events.append(self._event("GOAL_SET", cause=cause, goal=station))
        target = w.stations[station]
        if w.robot == target:
            self.plan = []
            self._arrive(events)
            return
        self.plan = plan_path(w, target)
        if not self.plan:
            events.append(self._event("PLAN_CHANGED", cause="replan", goal=station))
            w.goal = None

    # -- one tick ---------------------------------------------------------------

    def step(self) -> list:
        w = self.world
        w.tick += 1
        events: list = []

        self._move_person()
        self._consume_commands(events)
        self._assert_mission(events)
        self._movement(events)
        self._charging(events)
        return events

    def _move_person(self) -> None:
        w = self.world
        if len(w.person_path) < 2:
            return
        next_idx = (w.person_idx + 1) % len(w.person_path)
        # the person yields rather than ever sharing the robot's cell
        if w.person_path[next_idx] == w.robot and w.person_path[next_idx] != w.person:
            return
        w.person_idx = next_idx

    def _consume_commands(self, events: list) -> None:
        w = self.world
        pending, self._pending = self._pending, []
        for kind, arg in pending:
            if kind == "stop":
                if not self.frozen:
                    self.frozen = True
                    events.append(self._event("STOP", cause="command"))
            elif kind == "go":
                resumed = False
                if self.frozen:
                    self.frozen = False
                    resumed = True
                if self.wait_until is not None:
                    self.wait_until = None
                    resumed = True
                if resumed:
                    events.append(self._event("RESUME", cause="command"))
            elif kind == "wait":
                was_waiting = self.wait_until is not None and w.tick < self.wait_until
                self.wait_until = w.tick + WAIT_TICKS
                if not was_waiting:
                    events.append(self._event("WAIT", cause="command"))
            elif kind == "set-goal":
                self.saved_goal = None
                self.charge_mode = False
                self._set_goal(arg, "command", events)

    def _assert_mission(self, events: list) -> None:
        w = self.world
        if w.goal is not None or self.charge_mode:
            return
        if self.mission_idx >= len(w.mission):
            return
        step = w.mission[self.mission_idx]
        if step[0] == "goto":
            self._set_goal(step[1], None, events)

    def _movement(self, events: list) -> None:
        w = self.world
        if self.charge_mode or self.frozen:
            return
        if self.wait_until is not None:
            if w.tick < self.wait_until:
                return
            self.wait_until = None
            events.append(self._event("RESUME", cause="command"))
        if w.goal is None or not self.plan:
            return
        nxt = self.plan[0]
        if nxt == w.person:
            if not self.person_blocked:
                self.person_blocked = True
                events.append(self._event("STOP", cause="person"))
            return
        if self.person_blocked:
            self.person_blocked = False
            events.append(self._event("RESUME"))

        prev_cell = w.robot
        prev_heading = w.heading
        self.plan.pop(0)
        w.robot = nxt
        new_heading = _heading_between(prev_cell, nxt)
        w.heading = new_heading
        if w.battery > 0:
            w.battery -= 1
            if w.battery == BATTERY_THRESHOLD:
                events.append(self._event("BATTERY_LOW", cause="battery"))
                if w.goal != "charging-zone":
                    self.saved_goal = w.goal
                    self._set_goal("charging-zone", "battery", events)
                    return
        if new_heading != prev_heading and (
            _adjacent_to_obstacle(prev_cell, w) or _adjacent_to_obstacle(nxt, w)
        ):
            events.append(self._event("TURN", cause="obstacle"))
        if not self.plan and w.goal is not None and w.robot == w.stations.get(w.goal):
            self._arrive(events)

    def _arrive(self, events: list) -> None:
        w = self.world
        station = w.goal
        events.append(self._event("GOAL_REACHED", goal=station))
        w.goal = None
        if station == "charging-zone" and w.battery < 100:
            self.charge_mode = True

        if self.mission_idx < len(w.mission) and w.mission[self.mission_idx] == ("goto", station):
            self.mission_idx += 1
            while self.mission_idx < len(w.mission):
                step = w.mission[self.mission_idx]
                if step[0] == "pick":
                    obj = step[1]
                    if w.objects.get(obj) == w.robot and w.carried is None:
                        w.carried = obj
                        w.objects[obj] = None
                        events.append(self._event("PICK", obj=obj))
                        self.mission_idx += 1
                        continue
                    break
                if step[0] == "place":
                    obj = step[1]
                    if w.carried == obj:
                        w.carried = None
                        w.objects[obj] = w.robot
                        events.append(self._event("PLACE", obj=obj))
                        self.mission_idx += 1
                        continue
                    break
                if step[0] == "goto":
                    if not self.charge_mode:
                        self._set_goal(step[1], None, events)
                    break
                break

    def _charging(self, events: list) -> None:
        w = self.world
        if not self.charge_mode:
            return
        if w.robot != w.stations.get("charging-zone"):
            self.charge_mode = False
            return
        w.battery = min(100, w.battery + CHARGE_PER_TICK)
        if w.battery >= 100:
            self.charge_mode = False
            if self.saved_goal is not None:
                restored, self.saved_goal = self.saved_goal, None
                self._set_goal(restored, None, events)


# -- scripted headless runs -----------------------------------------------------


@dataclass
class RunResult:
    transcript: list
    trajectory: list
    events: list
    world: World


def parse_script(text: str) -> list:
    """Parse script lines ``<tick> <token> [arg]`` into (tick, payload) pairs."""
    from .dialogue import format_token, parse_token

    entries = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2 or len(parts) > 3:
            raise ScriptError(line_no, f"expected '<tick> <token> [arg]', got {raw!r}")
        try:
            tick = int(parts[0])
        except ValueError:
            raise ScriptError(line_no, f"bad tick {parts[0]!r}") from None
        if tick < 0:
            raise ScriptError(line_no, f"tick must be non-negative, got {tick}")
        payload = parts[1] if len(parts) == 2 else f"{parts[1]}:{parts[2]}"
        try:
            intent = parse_token(payload)
        except Exception:
            raise ScriptError(line_no, f"unknown intent token {payload!r}") from None
        entries.append((tick, format_token(intent)))
    return entries


def run_script(
    scenario: str,
    seed: int,
    script: list,
    ticks: int,
    *,
    profile=None,
    auto_adjust_enabled: bool = True,
) -> RunResult:
    """Drive the full loop (sim -> mapper -> dialogue -> composer) headlessly.

    ``script`` is a list of (tick, payload) pairs; intents scheduled for a
    tick run before that tick's world step, so a user command always beats
    the robot event arriving in the same tick.
    """
    from .composer import Composer
    from .dialogue import Engine
    from .lexicon import load_catalog
    from .mapper import EventMapper

    catalog = load_catalog()
    mapper = EventMapper(catalog)
    composer = Composer(catalog)
    world = load_scenario(scenario, seed)
    sim = SimRobot(world)
    engine = Engine(
        catalog,
        mapper,
        composer,
        profile=profile,
        clock=lambda: world.tick * 0.5,
        auto_adjust_enabled=auto_adjust_enabled,
    )
    by_tick: dict[int, list] = {}
    for tick, payload in script:
        by_tick.setdefault(tick, []).append(payload)

    trajectory = [world.robot]
    all_events = []
    for tick in range(1, ticks + 1):
        for payload in by_tick.get(tick, []):
            emission = engine.handle_payload(payload, tick=tick)
            for command in emission.commands:
                sim.apply_command(command.kind, command.arg)
        events = sim.step()
        for event in events:
            all_events.append(event)
            engine.on_robot_event(event)
        trajectory.append(world.robot)
    return RunResult(
        transcript=list(engine.transcript),
        trajectory=trajectory,
        events=all_events,
        world=world,
    )


def transcript_lines(transcript: list) -> str:
    """Serialize a transcript as one JSON object per line."""
    return "".join(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n" for entry in transcript)

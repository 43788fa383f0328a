import random

import pytest

from pictobridge.errors import InvalidTarget, ScriptError, UnknownScenario, UnknownStation
from pictobridge.simrobot import (
    SimRobot,
    World,
    load_scenario,
    parse_script,
    plan_path,
    run_script,
    transcript_lines,
)


def small_world(obstacles=(), robot=(0, 0), width=5, height=5):
    return World(
        width=width,
        height=height,
        obstacles=frozenset(obstacles),
        person_path=((4, 4),),
        person_idx=0,
        stations={"warehouse": (4, 0), "loading-zone": (4, 4), "charging-zone": (0, 4)},
        objects={},
        robot=robot,
        heading="E",
        carried=None,
        battery=100,
        goal=None,
        tick=0,
        mission=(),
        scenario="test",
        seed=0,
    )


# -- load_scenario ------------------------------------------------------------


def test_load_scenario_deterministic():
    assert load_scenario("warehouse", 42) == load_scenario("warehouse", 42)


def test_seed_changes_only_person_phase_and_obstacle():
    a, b = load_scenario("warehouse", 42), load_scenario("warehouse", 43)
    varying = {"obstacles", "person_idx"}
    for field_name in (
        "width", "height", "person_path", "stations", "objects", "robot",
        "heading", "carried", "battery", "goal", "tick", "mission", "scenario",
    ):
        assert getattr(a, field_name) == getattr(b, field_name), field_name
    assert {f for f in varying if getattr(a, f) != getattr(b, f)} <= varying


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        load_scenario("mars", 1)


def test_warehouse_contains_required_furniture():
    world = load_scenario("warehouse", 42)
    assert set(world.stations) == {"warehouse", "loading-zone", "charging-zone"}
    assert world.objects["box"] == world.stations["warehouse"]
    assert len(world.person_path) >= 2
    assert world.obstacles
    assert not set(world.stations.values()) & world.obstacles
    assert world.robot not in world.obstacles


# -- plan_path ------------------------------------------------------------------


def test_plan_path_straight_line():
    world = small_world()
    path = plan_path(world, (3, 0))
    assert path == [(1, 0), (2, 0), (3, 0)]


def test_plan_path_unreachable_returns_empty():
    # oracle: exhaustive reachability over the 5x5 world
    walls = {(1, 0), (1, 1), (0, 1)}
    world = small_world(obstacles=walls)
    assert plan_path(world, (4, 4)) == []

    reachable = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        x, y = frontier.pop()
        for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0)):
            nxt = (x + dx, y + dy)
            if (
                0 <= nxt[0] < 5 and 0 <= nxt[1] < 5
                and nxt not in walls and nxt not in reachable
            ):
                reachable.add(nxt)
                frontier.append(nxt)
    assert (4, 4) not in reachable


def test_plan_path_target_equals_start():
    world = small_world()
    assert plan_path(world, (0, 0)) == []


def test_plan_path_invalid_target():
    world = small_world(obstacles={(2, 2)})
    with pytest.raises(InvalidTarget):
        plan_path(world, (9, 9))
    with pytest.raises(InvalidTarget):
        plan_path(world, (2, 2))


def test_plan_path_shortest_length():
    world = small_world(obstacles={(2, 0), (2, 1)})
    path = plan_path(world, (4, 0))
    assert len(path) == 8  # manhattan 4 plus detour around the two-cell wall


def test_unreachable_goal_emits_plan_changed_once():
    world = small_world(obstacles={(1, 0), (1, 1), (0, 1)})
    sim = SimRobot(world)
    sim.apply_command("set-goal", "loading-zone")
    events = sim.step()
    assert [e.type for e in events] == ["GOAL_SET", "PLAN_CHANGED"]
    assert events[1].cause == "replan"
    assert world.goal is None
    assert sim.step() == []


# -- commands ----------------------------------------------------------------------


def test_stop_freezes_robot():
    world = load_scenario("warehouse", 42)
    sim = SimRobot(world)
    sim.step()  # mission goal set, first move
    position = world.robot
    sim.apply_command("stop")
    for _ in range(3):
        sim.step()
    assert world.robot == position


def test_stop_then_go_resumes():
    world = load_scenario("warehouse", 42)
    sim = SimRobot(world)
    sim.step()
    sim.apply_command("stop")
    events = sim.step()
    assert any(e.type == "STOP" and e.cause == "command" for e in events)
    sim.apply_command("go")
    events = sim.step()
    assert any(e.type == "RESUME" and e.cause == "command" for e in events)
    position = world.robot
    sim.step()
    assert world.robot != position


def test_wait_auto_resumes_after_five_ticks():
    # oracle: the motion rule table; wait at tick t resumes at tick t+5
    world = load_scenario("warehouse", 42)
    sim = SimRobot(world)
    sim.step()
    sim.apply_command("wait")
    resumes = []
    for _ in range(6):
        for event in sim.step():
            if event.type == "RESUME":
                resumes.append(event.sim_time)
    wait_tick = 2  # command consumed during tick 2
    assert resumes == [wait_tick + 5]


def test_set_goal_emits_goal_set_event():
    world = load_scenario("warehouse", 42)
    sim = SimRobot(world)
    sim.apply_command("set-goal", "charging-zone")
    events = sim.step()
    goal_sets = [e for e in events if e.type == "GOAL_SET" and e.cause == "command"]
    assert goal_sets and goal_sets[0].goal == "charging-zone"


def test_set_goal_unknown_station():
    sim = SimRobot(load_scenario("warehouse", 42))
    with pytest.raises(UnknownStation):
        sim.apply_command("set-goal", "mars")


def test_idle_without_goal():
    world = small_world()
    sim = SimRobot(world)
    for _ in range(5):
        assert sim.step() == []
    assert world.robot == (0, 0)


# -- stepping the shipped scenario ------------------------------------------------


def run_events(seed, ticks=40):
    world = load_scenario("warehouse", seed)
    sim = SimRobot(world)
    events = []
    for _ in range(ticks):
        events.extend(sim.step())
    return world, events


def test_mission_produces_turn_near_obstacle():
    _, events = run_events(42)
    turns = [e for e in events if e.type == "TURN"]
    assert turns and all(e.cause == "obstacle" for e in turns)


def test_seed_42_meets_the_person():
    _, events = run_events(42)
    stops = [e for e in events if e.type == "STOP"]
    assert any(e.cause == "person" for e in stops)
    resumes = [e for e in events if e.type == "RESUME"]
    assert resumes


def test_mission_completes_box_delivery():
    world, events = run_events(42)
    types = [e.type for e in events]
    assert "PICK" in types and "PLACE" in types
    assert world.objects["box"] == world.stations["loading-zone"]
    assert world.carried is None


def test_battery_low_diverts_to_charging():
    world = load_scenario("warehouse", 42)
    world.battery = 21
    sim = SimRobot(world)
    events = []
    for _ in range(60):
        events.extend(sim.step())
    types = [e.type for e in events]
    assert "BATTERY_LOW" in types
    low_index = types.index("BATTERY_LOW")
    assert types[low_index + 1] == "GOAL_SET"
    assert events[low_index + 1].goal == "charging-zone"
    assert events[low_index + 1].cause == "battery"
    assert world.battery > 21  # recharged at the station


def test_event_wellformedness_long_run(mapper):
    for seed in (42, 7, 99):
        _, events = run_events(seed, ticks=300)
        seqs = [e.seq for e in events]
        assert seqs == sorted(seqs) and len(set(seqs)) == len(seqs)
        for event in events:
            assert event.type in mapper.known_event_types()
            if event.type in ("TURN", "PLAN_CHANGED"):
                assert event.cause is not None
            if event.type in ("PICK", "PLACE"):
                assert event.object is not None
            if event.type == "GOAL_SET":
                assert event.goal is not None
            mapper.map_event(event)


def test_safety_and_battery_conservation():
    world = load_scenario("warehouse", 42)
    sim = SimRobot(world)
    last_battery = world.battery
    for _ in range(200):
        position_before = world.robot
        sim.step()
        assert world.robot not in world.obstacles
        assert world.robot != world.person
        assert 0 <= world.battery <= 100
        moved = world.robot != position_before
        if not moved and not sim.charge_mode:
            assert world.battery == last_battery
        last_battery = world.battery


# -- scripts and headless runs ------------------------------------------------------


def test_parse_script_formats():
    entries = parse_script("3 why\n5 define SLAM\n7 language:es\n\n# comment\n")
    assert entries == [(3, "why"), (5, "define:SLAM"), (7, "language:es")]


def test_parse_script_errors_name_line():
    with pytest.raises(ScriptError) as exc:
        parse_script("1 why\nnot-a-tick stop\n")
    assert "line 2" in str(exc.value)
    with pytest.raises(ScriptError):
        parse_script("1 frobnicate")


def test_run_script_deterministic():
    script = [(7, "why"), (9, "goal")]
    a = run_script("warehouse", 42, script, 40)
    b = run_script("warehouse", 42, script, 40)
    assert transcript_lines(a.transcript) == transcript_lines(b.transcript)


def test_run_script_empty_script_only_robot_messages():
    result = run_script("warehouse", 42, [], 40)
    for entry in result.transcript:
        assert entry["type"] == "message"
        assert entry["source"] == "robot-initiated"


def test_run_script_zero_ticks():
    result = run_script("warehouse", 42, [], 0)
    assert result.transcript == []
    assert result.events == []


def test_run_script_commands_reach_robot():
    result = run_script("warehouse", 42, [(2, "stop"), (10, "go")], 14)
    types = [(e.sim_time, e.type, e.cause) for e in result.events]
    assert (2, "STOP", "command") in types
    assert (10, "RESUME", "command") in types


def test_fuzzed_runs_hold_safety_and_history_invariants(catalog, mapper, composer):
    # 20 seeds x 500 ticks = 10,000 fuzzed ticks with random scripts
    tokens = ["why", "stop", "go", "wait", "goal", "repeat", "summary",
              "simpler", "images", "yes", "no", "step-by-step",
              "set-goal:charging-zone", "set-goal:loading-zone",
              "set-goal:warehouse", "define:SLAM", "language:es", "language:en"]
    from pictobridge.dialogue import Engine

    for seed in range(20):
        rng = random.Random(1000 + seed)
        script = sorted(
            (rng.randrange(1, 500), rng.choice(tokens)) for _ in range(25)
        )
        world = load_scenario("warehouse", seed)
        sim = SimRobot(world)
        engine = Engine(catalog, mapper, composer, clock=lambda: world.tick * 0.5)
        by_tick = {}
        for tick, payload in script:
            by_tick.setdefault(tick, []).append(payload)
        accepted_events = 0
        for tick in range(1, 501):
            for payload in by_tick.get(tick, []):
                emission = engine.handle_payload(payload, tick=tick)
                for command in emission.commands:
                    sim.apply_command(command.kind, command.arg)
            for event in sim.step():
                engine.on_robot_event(event)
                accepted_events += 1
            assert world.robot not in world.obstacles, seed
            assert world.robot != world.person, seed
            assert 0 <= world.battery <= 100, seed
        assert len(engine.history) == accepted_events, seed

"""Figures for headless runs: a map of the grid world with the robot's
trajectory, and a timeline of events and messages. Written next to the
transcript so a run can be reviewed at a glance."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from .simrobot import RunResult

_SOURCE_COLORS = {
    "robot-initiated": "#1f77b4",
    "user-initiated": "#2ca02c",
    "system": "#7f7f7f",
}


def render_world_figure(result: RunResult, path: str | Path) -> Path:
    """Grid map: obstacles, stations, person patrol, robot trajectory."""
    world = result.world
    fig, ax = plt.subplots(figsize=(7, 5.6))
    for x, y in world.obstacles:
        ax.add_patch(Rectangle((x - 0.5, y - 0.5), 1, 1, color="#444444"))
    for name, (x, y) in world.stations.items():
        ax.add_patch(Rectangle((x - 0.5, y - 0.5), 1, 1, color="#ffe08a"))
        ax.annotate(name, (x, y - 0.55), ha="center", fontsize=7)
    px = [c[0] for c in world.person_path]
    py = [c[1] for c in world.person_path]
    ax.plot(px, py, "--", color="#d62728", linewidth=1, label="person patrol")
    tx = [c[0] for c in result.trajectory]
    ty = [c[1] for c in result.trajectory]
    ax.plot(tx, ty, "-", color="#1f77b4", linewidth=2, label="robot trajectory")
    ax.plot(tx[0], ty[0], "o", color="#1f77b4")
    ax.plot(tx[-1], ty[-1], "s", color="#1f77b4")
    for event in result.events:
        if event.type in ("TURN", "STOP") and event.location:
            ax.annotate(
                event.type.lower(),
                event.location,
                textcoords="offset points",
                xytext=(4, 4),
                fontsize=6,
                color="#d62728",
            )
    ax.set_xlim(-0.5, world.width - 0.5)
    ax.set_ylim(world.height - 0.5, -0.5)  # grid y grows downward
    ax.set_xticks(range(world.width))
    ax.set_yticks(range(world.height))
    ax.grid(True, linewidth=0.3, alpha=0.5)
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=7)
    ax.set_title(f"{world.scenario} (seed {world.seed}), {world.tick} ticks")
    out = Path(path)
    fig.savefig(out, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return out


def render_timeline_figure(result: RunResult, path: str | Path) -> Path:
    """Event and message timeline over simulation ticks."""
    fig, ax = plt.subplots(figsize=(8, 3.2))
    types = sorted({e.type for e in result.events})
    lanes = {t: i for i, t in enumerate(types)}
    for event in result.events:
        ax.plot(event.sim_time, lanes[event.type], "k|", markersize=10)
    offset = len(types)
    seq_to_tick = {e.seq: e.sim_time for e in result.events}
    tick = 0
    for entry in result.transcript:
        if entry.get("type") == "intent":
            tick = entry.get("tick", tick)
            continue
        source = entry.get("source", "system")
        lane = offset + list(_SOURCE_COLORS).index(source)
        x = seq_to_tick.get(entry.get("provenance"), tick)
        ax.plot(x, lane, "o", color=_SOURCE_COLORS[source], markersize=4)
    labels = types + list(_SOURCE_COLORS)
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels, fontsize=7)
    ax.set_xlabel("tick")
    ax.grid(True, axis="x", linewidth=0.3, alpha=0.5)
    ax.set_title("run timeline")
    out = Path(path)
    fig.savefig(out, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return out


def render_run_figures(result: RunResult, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [
        render_world_figure(result, out / "trajectory.png"),
        render_timeline_figure(result, out / "timeline.png"),
    ]

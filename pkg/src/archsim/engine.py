"""Deterministic simulation loop.

Each step visits every live agent once, in a fresh seeded random
permutation.  An agent aims at the nearest exit coordinate, scans its
vision cone for the closest free cell, lets social comparison override
that choice, then takes one pace (one 8-neighbor cell) toward the
resulting target if the pace cell is free.  Reaching an exit coordinate
(distance < 1) marks the agent as exited; the body keeps occupying the
doorway until the agent's next activation, when it moves off the world
— so exit cells are briefly blocked and the door is a real bottleneck.

A run is a pure function of its config: identical configs (seed
included) produce identical traces.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .agent import (
    Agent,
    SimilaritySpec,
    choose_target_cell,
    cone_offsets,
    heading_toward,
    most_similar_neighbor,
    sct_adjust,
)
from .errors import ConfigError, CrowdTooLargeError
from .world import WorldGrid, build_world, is_free, nearest_exit_coordinate

TRACE_HEADER = ["t", "agent_id", "transverse", "longitudinal", "exited"]
SUMMARY_HEADER = ["t", "exits_this_step", "stationary_count"]


@dataclass
class SimConfig:
    """All tunables for one run."""

    c: int
    w: int
    W: int = 19
    L: int = 60
    seed: int = 0
    max_steps: int = 5000
    vision_radius: int = 3
    spawn_margin: int = 5
    similarity: SimilaritySpec = None  # defaults to d_max = vision_radius

    def __post_init__(self):
        if self.similarity is None:
            self.similarity = SimilaritySpec(d_max=float(self.vision_radius))

    def validate(self) -> None:
        if self.c < 0:
            raise ConfigError(f"crowd size c={self.c} must be nonnegative")
        if self.max_steps < 1:
            raise ConfigError(f"max_steps={self.max_steps} must be positive")
        if self.vision_radius < 1:
            raise ConfigError(f"vision_radius={self.vision_radius} must be >= 1")
        if self.spawn_margin < 0 or self.spawn_margin >= self.L:
            raise ConfigError(f"spawn_margin={self.spawn_margin} outside corridor")
        if self.seed < 0:
            raise ConfigError(f"seed={self.seed} must be nonnegative")
        build_world(self.W, self.L, self.w)  # geometry preconditions


@dataclass
class StepRecord:
    """Per-step snapshot: agent arrays are indexed by agent id."""

    t: int
    xs: np.ndarray
    ys: np.ndarray
    exited: np.ndarray
    moved: np.ndarray
    exits_this_step: int

    @property
    def agent_count(self) -> int:
        return len(self.xs)

    @property
    def exited_count(self) -> int:
        return int(self.exited.sum())

    @property
    def stationary_count(self) -> int:
        """Live agents that did not move this step."""
        return int((~self.exited & ~self.moved).sum())


def _snapshot(t: int, agents: list[Agent], exits_this_step: int) -> StepRecord:
    n = len(agents)
    xs = np.fromiter((a.pos[0] for a in agents), dtype=np.int16, count=n)
    ys = np.fromiter((a.pos[1] for a in agents), dtype=np.int16, count=n)
    exited = np.fromiter((a.exited for a in agents), dtype=bool, count=n)
    moved = np.fromiter((a.moved_last_step for a in agents), dtype=bool, count=n)
    return StepRecord(t, xs, ys, exited, moved, exits_this_step)


def initialize(config: SimConfig) -> tuple[WorldGrid, list[Agent], np.random.Generator]:
    """Build the world and place the crowd.

    Agents land uniformly at random (seeded) on distinct free cells at
    longitudinal coordinate >= spawn_margin, headings aimed at their
    nearest exit coordinate.
    """
    config.validate()
    grid = build_world(config.W, config.L, config.w)
    rng = np.random.default_rng(config.seed)
    spawn = [
        (x, y)
        for y in range(config.spawn_margin, config.L)
        for x in range(config.W)
        if not grid.is_wall((x, y))
    ]
    if config.c > len(spawn):
        raise CrowdTooLargeError(
            f"crowd size c={config.c} exceeds {len(spawn)} spawnable cells"
        )
    picks = rng.choice(len(spawn), size=config.c, replace=False)
    agents = []
    for agent_id, i in enumerate(picks):
        pos = spawn[int(i)]
        heading = heading_toward(pos, nearest_exit_coordinate(grid, pos))
        grid.place(agent_id, pos)
        agents.append(Agent(id=agent_id, pos=pos, heading=heading))
    return grid, agents, rng


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def _visible_agents(
    agent: Agent, grid: WorldGrid, agents: list[Agent], radius: int
) -> list[Agent]:
    """Live agents standing on cells inside the vision cone."""
    x, y = agent.pos
    occupancy = grid.occupancy
    out = []
    for ox, oy, _ in cone_offsets(radius, agent.heading):
        other_id = occupancy.get((x + ox, y + oy))
        if other_id is not None:
            other = agents[other_id]
            if not other.exited:
                out.append(other)
    return out


def step(
    grid: WorldGrid,
    agents: list[Agent],
    rng: np.random.Generator,
    config: SimConfig,
    t: int,
) -> StepRecord:
    """Advance the simulation by one step and record the result."""
    radius = config.vision_radius
    spec = config.similarity
    exits_this_step = 0

    for idx in rng.permutation(len(agents)):
        agent = agents[int(idx)]
        if agent.exited:
            # a freshly exited body clears the doorway at its next
            # activation ("moves to the edge of the world")
            if grid.occupancy.get(agent.pos) == agent.id:
                grid.vacate(agent.pos)
            agent.moved_last_step = False
            continue

        target_exit = nearest_exit_coordinate(grid, agent.pos)
        if agent.pos == target_exit:  # already standing on an exit coordinate
            agent.exited = True
            agent.moved_last_step = False
            exits_this_step += 1
            continue
        agent.heading = heading_toward(agent.pos, target_exit)

        goal = choose_target_cell(agent, grid, radius)
        visible = _visible_agents(agent, grid, agents, radius)
        comparison = most_similar_neighbor(agent, visible, spec)
        target = sct_adjust(agent, comparison, goal, grid, radius, spec)

        moved = False
        if target is not None:
            pace = (
                agent.pos[0] + _sign(target[0] - agent.pos[0]),
                agent.pos[1] + _sign(target[1] - agent.pos[1]),
            )
            if is_free(grid, pace):
                grid.move(agent.pos, pace)
                agent.pos = pace
                moved = True
        agent.moved_last_step = moved

        new_exit = nearest_exit_coordinate(grid, agent.pos)
        if agent.pos == new_exit:  # distance < 1 on integer cells means distance 0
            agent.exited = True
            exits_this_step += 1
        else:
            agent.heading = heading_toward(agent.pos, new_exit)

    record = _snapshot(t, agents, exits_this_step)
    live = record.agent_count - record.exited_count
    dwelling = sum(
        1 for a in agents if a.exited and grid.occupancy.get(a.pos) == a.id
    )
    assert len(grid.occupancy) == live + dwelling, "occupancy out of sync"
    return record


def run(config: SimConfig) -> list[StepRecord]:
    """Run until every agent has exited or max_steps is reached.

    Returns the full trace including the initial (t=0) snapshot.
    """
    grid, agents, rng = initialize(config)
    records = [_snapshot(0, agents, 0)]
    if records[0].exited_count == len(agents):  # empty crowd
        return records
    for t in range(1, config.max_steps + 1):
        record = step(grid, agents, rng, config, t)
        records.append(record)
        if record.exited_count == len(agents):
            break
    return records


def write_trace_csv(records: list[StepRecord], path) -> None:
    """One row per (step, agent): positions and exited flags over time."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for rec in records:
            for agent_id in range(rec.agent_count):
                writer.writerow(
                    [
                        rec.t,
                        agent_id,
                        int(rec.xs[agent_id]),
                        int(rec.ys[agent_id]),
                        int(rec.exited[agent_id]),
                    ]
                )


def write_summary_csv(records: list[StepRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for rec in records:
            writer.writerow([rec.t, rec.exits_this_step, rec.stationary_count])


def read_trace_csv(path) -> list[StepRecord]:
    """Rebuild StepRecords from a trace CSV (inverse of write_trace_csv)."""
    by_step: dict[int, list[tuple[int, int, int, int]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRACE_HEADER:
            raise ConfigError(f"unexpected trace header: {header}")
        for row in reader:
            t, agent_id, x, y, exited = (int(v) for v in row)
            by_step.setdefault(t, []).append((agent_id, x, y, exited))
    records = []
    for t in sorted(by_step):
        rows = sorted(by_step[t])
        xs = np.array([r[1] for r in rows], dtype=np.int16)
        ys = np.array([r[2] for r in rows], dtype=np.int16)
        exited = np.array([bool(r[3]) for r in rows])
        prev_exited = records[-1].exited if records else np.zeros(len(rows), dtype=bool)
        if records:
            moved = (xs != records[-1].xs) | (ys != records[-1].ys)
        else:
            moved = np.zeros(len(rows), dtype=bool)
        exits = int((exited & ~prev_exited).sum())
        records.append(StepRecord(t, xs, ys, exited, moved, exits))
    return records

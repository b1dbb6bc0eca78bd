"""Factorial experiment harness: crowd size x exit width, replicated.

Every run's seed is derived by hashing (base_seed, c, w, replicate), so
any single cell can be reproduced in isolation and the full sweep gives
identical results no matter how many workers execute it or in what
order the cells finish.
"""

from __future__ import annotations

import csv
import hashlib
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass

from .engine import SimConfig, run
from .errors import ConfigError
from .metrics import detect_arch_onset
from .world import build_world

MEASUREMENT_HEADER = [
    "c", "w", "W", "seed", "replicate", "arch_detected", "T", "M", "m", "cluster_size",
]
ERROR_HEADER = ["c", "w", "replicate", "error"]

DEFAULT_C_LEVELS = (200, 300, 350, 400, 450)
DEFAULT_W_LEVELS = (1, 3, 5, 7, 9, 11, 13)


@dataclass
class SweepConfig:
    c_levels: tuple = DEFAULT_C_LEVELS
    w_levels: tuple = DEFAULT_W_LEVELS
    replicates: int = 3
    base_seed: int = 0
    W: int = 19
    L: int = 60
    max_steps: int = 5000
    vision_radius: int = 3
    spawn_margin: int = 5
    threshold_factor: float = 3.0
    persistence: int = 3
    trigger_threshold: float = 0.5
    d_max: float = None  # defaults to vision_radius

    def validate(self) -> None:
        if not self.c_levels or not self.w_levels:
            raise ConfigError("c_levels and w_levels must be nonempty")
        if self.replicates < 1:
            raise ConfigError(f"replicates={self.replicates} must be >= 1")
        if self.persistence < 1:
            raise ConfigError(f"persistence={self.persistence} must be >= 1")
        if self.threshold_factor <= 0:
            raise ConfigError(f"threshold_factor={self.threshold_factor} must be > 0")

    def sim_config(self, c: int, w: int, replicate: int) -> SimConfig:
        from .agent import SimilaritySpec

        seed = derive_seed(self.base_seed, c, w, replicate)
        d_max = self.d_max if self.d_max is not None else float(self.vision_radius)
        spec = SimilaritySpec(d_max=d_max, trigger_threshold=self.trigger_threshold)
        return SimConfig(
            c=c, w=w, W=self.W, L=self.L, seed=seed, max_steps=self.max_steps,
            vision_radius=self.vision_radius, spawn_margin=self.spawn_margin,
            similarity=spec,
        )


def derive_seed(base_seed: int, c: int, w: int, replicate: int) -> int:
    """Stable per-cell seed: first 8 bytes of sha256('base:c:w:rep')."""
    digest = hashlib.sha256(f"{base_seed}:{c}:{w}:{replicate}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class MeasurementRow:
    c: int
    w: int
    W: int
    seed: int
    replicate: int
    arch_detected: bool
    T: int | None = None
    M: int | None = None
    m: int | None = None
    cluster_size: int | None = None

    def to_csv_row(self) -> list:
        opt = lambda v: "" if v is None else v
        return [
            self.c, self.w, self.W, self.seed, self.replicate,
            int(self.arch_detected), opt(self.T), opt(self.M), opt(self.m),
            opt(self.cluster_size),
        ]

    @classmethod
    def from_csv_row(cls, row) -> "MeasurementRow":
        opt = lambda v: None if v == "" else int(v)
        return cls(
            c=int(row[0]), w=int(row[1]), W=int(row[2]), seed=int(row[3]),
            replicate=int(row[4]), arch_detected=bool(int(row[5])),
            T=opt(row[6]), M=opt(row[7]), m=opt(row[8]), cluster_size=opt(row[9]),
        )


@dataclass
class SweepError:
    c: int
    w: int
    replicate: int
    error: str


def run_cell(config: SweepConfig, c: int, w: int, replicate: int) -> MeasurementRow:
    """Simulate one factorial cell and measure its arch."""
    sim_config = config.sim_config(c, w, replicate)
    records = run(sim_config)
    grid = build_world(config.W, config.L, w)
    measurement = detect_arch_onset(
        records, grid, config.threshold_factor, config.persistence
    )
    return MeasurementRow(
        c=c, w=w, W=config.W, seed=sim_config.seed, replicate=replicate,
        arch_detected=measurement.arch_detected, T=measurement.T,
        M=measurement.M, m=measurement.m, cluster_size=measurement.cluster_size,
    )


def run_sweep(
    config: SweepConfig, parallelism: int = 1, progress=None
) -> tuple[list[MeasurementRow], list[SweepError]]:
    """Run every (c, w, replicate) cell.

    Failed cells are collected rather than aborting the sweep.  Both
    returned lists are sorted by (c, w, replicate), so the output is
    byte-identical across parallelism settings.
    """
    config.validate()
    tasks = [
        (c, w, rep)
        for c in config.c_levels
        for w in config.w_levels
        for rep in range(config.replicates)
    ]
    rows: list[MeasurementRow] = []
    errors: list[SweepError] = []
    done = 0

    def finish(task, row, err):
        nonlocal done
        done += 1
        if err is None:
            rows.append(row)
        else:
            errors.append(SweepError(task[0], task[1], task[2], err))
        if progress is not None:
            progress(done, len(tasks), task)

    if parallelism <= 1:
        for task in tasks:
            try:
                row = run_cell(config, *task)
                finish(task, row, None)
            except Exception as exc:  # noqa: BLE001 - cell failures are data
                finish(task, None, f"{type(exc).__name__}: {exc}")
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = {pool.submit(run_cell, config, *task): task for task in tasks}
            pending = set(futures)
            while pending:
                finished, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in finished:
                    task = futures[fut]
                    try:
                        finish(task, fut.result(), None)
                    except Exception as exc:  # noqa: BLE001
                        finish(task, None, f"{type(exc).__name__}: {exc}")

    rows.sort(key=lambda r: (r.c, r.w, r.replicate))
    errors.sort(key=lambda e: (e.c, e.w, e.replicate))
    return rows, errors


def write_measurements_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MEASUREMENT_HEADER)
        for row in rows:
            writer.writerow(row.to_csv_row())


def read_measurements_csv(path) -> list[MeasurementRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MEASUREMENT_HEADER:
            raise ConfigError(f"{path}: unexpected measurement header: {header}")
        for lineno, raw in enumerate(reader, start=2):
            try:
                rows.append(MeasurementRow.from_csv_row(raw))
            except (ValueError, IndexError) as exc:
                raise ConfigError(f"{path}: row {lineno}: {exc}") from None
    return rows


def write_errors_csv(errors, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ERROR_HEADER)
        for err in errors:
            writer.writerow([err.c, err.w, err.replicate, err.error])

"""Shared fixtures and record-building helpers for the test suite."""

import time
from types import SimpleNamespace

import numpy as np
import pytest

from archsim.engine import StepRecord


def make_record(t, positions, moved=(), exited=(), exits_this_step=0):
    """Build a StepRecord from a list of (x, y); list index is the agent id.

    `moved` and `exited` are iterables of agent ids whose flags are set.
    """
    n = len(positions)
    xs = np.array([p[0] for p in positions], dtype=np.int16)
    ys = np.array([p[1] for p in positions], dtype=np.int16)
    ex = np.zeros(n, dtype=bool)
    mv = np.zeros(n, dtype=bool)
    for i in exited:
        ex[i] = True
    for i in moved:
        mv[i] = True
    return StepRecord(t, xs, ys, ex, mv, exits_this_step)


@pytest.fixture(scope="session")
def default_sweep(tmp_path_factory):
    """One full default sweep (5 c-levels x 7 w-levels x 3 replicates).

    Run once per session through the CLI and shared by the CLI tests and
    the acceptance suite; `elapsed` is the wall-clock time of the sweep
    command itself.
    """
    from archsim.cli import main
    from archsim.sweep import read_measurements_csv

    out = tmp_path_factory.mktemp("default_sweep")
    t0 = time.perf_counter()
    status = main(["sweep", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    assert status == 0
    rows = read_measurements_csv(out / "measurements.csv")
    return SimpleNamespace(rows=rows, elapsed=elapsed, out=out)

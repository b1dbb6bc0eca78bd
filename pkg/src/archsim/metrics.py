"""Arch detection and measurement on recorded runs.

An arch shows up as a clog: a connected blob of agents that stopped
moving because the cells ahead of them are taken, anchored at the exit.
We take the largest 8-connected component of stationary live agents
that touches the exit (some member within Euclidean distance 1 of an
exit cell), call its first sufficiently large and persistent appearance
the onset, and measure its axes there: M is how deep it reaches into
the corridor, m is how wide it spans the exit wall.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

from .errors import EmptyClusterError
from .world import Cell, WorldGrid

_NEIGHBORS = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]
_UPSTREAM = [(-1, 1), (0, 1), (1, 1)]


@dataclass
class ArchMeasurement:
    arch_detected: bool
    T: int | None = None
    M: int | None = None
    m: int | None = None
    cluster_size: int | None = None


def _stationary_cells(record) -> set[Cell]:
    mask = ~record.exited & ~record.moved
    return {(int(x), int(y)) for x, y in zip(record.xs[mask], record.ys[mask])}


def _components(cells: set[Cell]) -> list[set[Cell]]:
    """8-connected components, flood fill over a sparse cell set."""
    remaining = set(cells)
    components = []
    while remaining:
        seed = remaining.pop()
        comp = {seed}
        frontier = [seed]
        while frontier:
            x, y = frontier.pop()
            for dx, dy in _NEIGHBORS:
                nb = (x + dx, y + dy)
                if nb in remaining:
                    remaining.remove(nb)
                    comp.add(nb)
                    frontier.append(nb)
        components.append(comp)
    return components


def _touches_exit(comp: set[Cell], exit_cells) -> bool:
    for x, y in comp:
        for ex, ey in exit_cells:
            if (x - ex) ** 2 + (y - ey) ** 2 <= 1:
                return True
    return False


def clog_cluster(record, grid: WorldGrid) -> set[Cell]:
    """Largest exit-anchored component of stationary live agents.

    Returns an empty set when nothing qualifies.  Among equally large
    components the one with the smallest cell wins, so the result never
    depends on iteration order.
    """
    candidates = [
        comp
        for comp in _components(_stationary_cells(record))
        if _touches_exit(comp, grid.exit_cells)
    ]
    if not candidates:
        return set()
    candidates.sort(key=lambda comp: (-len(comp), min(comp)))
    return candidates[0]


def detect_arch_onset(
    records, grid: WorldGrid, threshold_factor: float = 3.0, persistence: int = 3
) -> ArchMeasurement:
    """Find the arch onset in a trace and measure the arch there.

    The onset T is the first step whose clog cluster holds at least
    threshold_factor * w agents and whose cluster stays nonempty for the
    next `persistence` steps.  Returns a no-arch measurement when no
    step qualifies (or the trace ends before persistence can be
    confirmed).
    """
    threshold = threshold_factor * grid.exit_width
    clusters = [clog_cluster(rec, grid) for rec in records]
    for i, cluster in enumerate(clusters):
        if len(cluster) < threshold:
            continue
        window = clusters[i + 1 : i + 1 + persistence]
        if len(window) < persistence or not all(window):
            continue
        M, m = measure_axes(cluster)
        assert m <= grid.width, "arch wider than the corridor"
        return ArchMeasurement(
            True, T=records[i].t, M=M, m=m, cluster_size=len(cluster)
        )
    return ArchMeasurement(arch_detected=False)


def measure_axes(cluster: set[Cell]) -> tuple[int, int]:
    """(M, m): depth into the corridor and span along the exit wall.

    M is the maximal longitudinal coordinate (the exit wall sits at 0);
    m is the transverse extent, max - min + 1.
    """
    if not cluster:
        raise EmptyClusterError("cannot measure an empty cluster")
    M = max(y for _, y in cluster)
    xs = [x for x, _ in cluster]
    m = max(xs) - min(xs) + 1
    return M, m


def cluster_frontier(cluster: set[Cell]) -> set[Cell]:
    """Cluster cells with at least one upstream 8-neighbor outside the
    cluster — the boundary facing into the corridor."""
    if not cluster:
        raise EmptyClusterError("cannot take the frontier of an empty cluster")
    return {
        (x, y)
        for x, y in cluster
        if any((x + dx, y + dy) not in cluster for dx, dy in _UPSTREAM)
    }


def exit_centered(cells, grid: WorldGrid) -> list[tuple[float, float]]:
    """Shift positions so x is measured from the exit segment's center."""
    cx = sum(x for x, _ in grid.exit_cells) / len(grid.exit_cells)
    return [(x - cx, float(y)) for x, y in cells]


def ellipse_fit_residual(frontier, M: float, m: float) -> float:
    """RMS deviation of frontier points from a half-ellipse.

    Points are exit-centered (x from the exit midpoint, y from the
    wall); the ellipse has semi-axes m/2 along the wall and M into the
    corridor.  0 means the frontier lies exactly on it.
    """
    points = list(frontier)
    if not points:
        raise EmptyClusterError("cannot fit an ellipse to an empty frontier")
    a = m / 2.0
    residuals = [(x / a) ** 2 + (y / M) ** 2 - 1.0 for x, y in points]
    return sqrt(sum(r * r for r in residuals) / len(residuals))

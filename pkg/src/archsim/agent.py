"""The simulated individual and its per-step decision primitives.

An agent carries a position, a heading (pointed at its current target
exit coordinate), and an attribute tuple used for social comparison.
Movement decisions are pure functions of (agent, world snapshot):

* :func:`field_of_desire` lists the cells inside the forward vision
  cone, a 100-degree wedge facing the heading.
* :func:`choose_target_cell` picks the closest free visible cell.
* When an agent's best social match looks too dissimilar, the agent is
  triggered to close the gap: :func:`sct_adjust` overrides the target
  with the visible free cell nearest the match.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import ConfigError
from .world import Cell, WorldGrid, is_free

HALF_CONE = math.radians(50.0)  # half of the 100-degree vision field
_ANGLE_EPS = 1e-9  # a cell exactly on the cone boundary counts as inside

TWO_PI = 2.0 * math.pi


@dataclass(slots=True)
class Agent:
    id: int
    pos: Cell
    heading: float = 0.0  # radians in [0, 2*pi)
    attributes: tuple[float, ...] = ()  # extra normalized scalars, usually empty
    exited: bool = False
    moved_last_step: bool = False


@dataclass(frozen=True)
class SimilaritySpec:
    """Weights and constants for the pairwise similarity function.

    ``kinds`` names one comparison dimension per weight.  Supported
    kinds: ``distance`` (Euclidean separation, saturating at ``d_max``
    cells), ``heading`` (minimal angular difference), and ``scalar``
    (absolute difference of the agents' own attribute values; each
    ``scalar`` entry consumes the next attribute slot in order).
    """

    kinds: tuple[str, ...] = ("distance", "heading")
    weights: tuple[float, ...] = (0.5, 0.5)
    d_max: float = 3.0
    trigger_threshold: float = 0.5

    def __post_init__(self):
        if len(self.kinds) != len(self.weights):
            raise ConfigError("similarity kinds and weights must have equal length")
        if not self.kinds:
            raise ConfigError("similarity spec needs at least one dimension")
        if any(w < 0 for w in self.weights):
            raise ConfigError("similarity weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ConfigError(f"similarity weights must sum to 1, got {sum(self.weights)}")
        if self.d_max <= 0:
            raise ConfigError("d_max must be positive")
        if not 0.0 <= self.trigger_threshold <= 1.0:
            raise ConfigError("trigger_threshold must lie in [0, 1]")
        for kind in self.kinds:
            if kind not in ("distance", "heading", "scalar"):
                raise ConfigError(f"unknown similarity dimension kind: {kind!r}")


def wrap_angle(a: float) -> float:
    """Map an angle into [0, 2*pi)."""
    a = math.fmod(a, TWO_PI)
    return a + TWO_PI if a < 0 else a


def signed_deviation(angle: float, heading: float) -> float:
    """Smallest signed rotation from ``heading`` to ``angle``, in (-pi, pi]."""
    d = math.fmod(angle - heading, TWO_PI)
    if d > math.pi:
        d -= TWO_PI
    elif d <= -math.pi:
        d += TWO_PI
    return d


def heading_toward(src: Cell, dst: Cell) -> float:
    """Heading angle from ``src`` to ``dst`` in [0, 2*pi).

    Falls back to 0 for coincident cells; callers treat that case
    (distance 0) as already-exited before the heading matters.
    """
    return wrap_angle(math.atan2(dst[1] - src[1], dst[0] - src[0]))


def dimension_similarity(kind: str, x: float, y: float, spec: SimilaritySpec) -> float:
    """Similarity of two values on one comparison dimension, in [0, 1].

    1 means identical, monotonically nonincreasing in the difference.
    """
    if kind == "distance":
        d = abs(x - y)
        return max(0.0, 1.0 - d / spec.d_max)
    if kind == "heading":
        dt = abs(signed_deviation(x, y))
        return 1.0 - dt / math.pi
    if kind == "scalar":
        return max(0.0, 1.0 - abs(x - y))
    raise ConfigError(f"unknown similarity dimension kind: {kind!r}")


def similarity(x: Agent, y: Agent, spec: SimilaritySpec) -> float:
    """Weighted sum of per-dimension similarities between two agents."""
    total = 0.0
    scalar_slot = 0
    dist = None
    for kind, weight in zip(spec.kinds, spec.weights):
        if kind == "distance":
            if dist is None:
                dist = math.hypot(x.pos[0] - y.pos[0], x.pos[1] - y.pos[1])
            s = dimension_similarity(kind, dist, 0.0, spec)
        elif kind == "heading":
            s = dimension_similarity(kind, x.heading, y.heading, spec)
        else:  # scalar
            s = dimension_similarity(kind, x.attributes[scalar_slot], y.attributes[scalar_slot], spec)
            scalar_slot += 1
        total += s * weight
    return total


def most_similar_neighbor(
    agent: Agent, visible: list[Agent], spec: SimilaritySpec
) -> tuple[Agent, float] | None:
    """The visible agent with the highest similarity score, ties to lowest id."""
    best = None
    best_score = -1.0
    for other in visible:
        score = similarity(agent, other, spec)
        if score > best_score or (score == best_score and other.id < best.id):
            best = other
            best_score = score
    if best is None:
        return None
    return best, best_score


@lru_cache(maxsize=None)
def _disc_offsets(radius: int) -> tuple[tuple[int, int, float], ...]:
    """All nonzero integer offsets within Euclidean ``radius``, with distances."""
    out = []
    for oy in range(-radius, radius + 1):
        for ox in range(-radius, radius + 1):
            if ox == 0 and oy == 0:
                continue
            d2 = ox * ox + oy * oy
            if d2 <= radius * radius:
                out.append((ox, oy, math.sqrt(d2)))
    return tuple(out)


@lru_cache(maxsize=None)
def cone_offsets(radius: int, heading: float) -> tuple[tuple[int, int, float], ...]:
    """Offsets inside the vision cone, in deterministic preference order.

    Ordered by (distance, absolute angular deviation, clockwise first):
    the natural scan order for "closest free space" with fixed tie
    breaks.  Cached on the exact heading float; headings are atan2 of
    integer deltas, so the same direction always hits the same entry.
    """
    selected = []
    for ox, oy, dist in _disc_offsets(radius):
        dev = signed_deviation(math.atan2(oy, ox), heading)
        adev = abs(dev)
        if adev <= HALF_CONE + _ANGLE_EPS:
            # clockwise (negative rotation) wins ties on |deviation|
            selected.append((dist, adev, 0 if dev < 0 else 1, ox, oy))
    selected.sort()
    return tuple((ox, oy, dist) for dist, _, _, ox, oy in selected)


def field_of_desire(agent: Agent, grid: WorldGrid, radius: int) -> list[Cell]:
    """In-bounds cells visible to the agent, nearest and most-aligned first.

    Pure geometry: occupancy does not affect membership, only later
    filtering.  Cells deviating more than 50 degrees from the heading
    are outside the field.
    """
    x, y = agent.pos
    out = []
    for ox, oy, _ in cone_offsets(radius, agent.heading):
        cell = (x + ox, y + oy)
        if grid.in_bounds(cell):
            out.append(cell)
    return out


def choose_target_cell(agent: Agent, grid: WorldGrid, radius: int) -> Cell | None:
    """Closest free cell in the vision cone, or None when fully blocked.

    Ties on distance resolve toward the smallest angular deviation,
    then the clockwise side (the cone scan order).
    """
    x, y = agent.pos
    for ox, oy, _ in cone_offsets(radius, agent.heading):
        cell = (x + ox, y + oy)
        if is_free(grid, cell):
            return cell
    return None


def sct_adjust(
    agent: Agent,
    comparison: tuple[Agent, float] | None,
    goal_target: Cell | None,
    grid: WorldGrid,
    radius: int,
    spec: SimilaritySpec,
) -> Cell | None:
    """Override the goal target when social comparison is triggered.

    If the best match scores below the trigger threshold, the agent
    moves to reduce the difference: the target becomes the visible free
    cell closest to the match's position.  Otherwise the goal target
    passes through unchanged.
    """
    if comparison is None:
        return goal_target
    other, score = comparison
    if score >= spec.trigger_threshold:
        return goal_target
    x, y = agent.pos
    tx, ty = other.pos
    best = None
    best_d2 = None
    for ox, oy, _ in cone_offsets(radius, agent.heading):
        cell = (x + ox, y + oy)
        if not is_free(grid, cell):
            continue
        dx = cell[0] - tx
        dy = cell[1] - ty
        d2 = dx * dx + dy * dy
        if best_d2 is None or d2 < best_d2:  # ties keep the earlier cone cell
            best = cell
            best_d2 = d2
    return best

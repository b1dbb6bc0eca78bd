"""Flat text config files: one `key = value` per line.

Blank lines and `#` comments are ignored.  Every key must be known and
typed correctly or parsing fails loudly — a typo in an experiment config
should never silently fall back to a default.
"""

from __future__ import annotations

from dataclasses import fields

from .engine import SimConfig
from .errors import ConfigError
from .sweep import SweepConfig


def _int_list(raw: str) -> tuple:
    try:
        return tuple(int(part.strip()) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {raw!r}") from None


# key -> (parser, which configs use it)
_KEY_TYPES = {
    "c": int,
    "w": int,
    "W": int,
    "L": int,
    "seed": int,
    "max_steps": int,
    "vision_radius": int,
    "spawn_margin": int,
    "trigger_threshold": float,
    "d_max": float,
    "c_levels": _int_list,
    "w_levels": _int_list,
    "replicates": int,
    "base_seed": int,
    "threshold_factor": float,
    "persistence": int,
}


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _KEY_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        parser = _KEY_TYPES[key]
        try:
            values[key] = parser(raw_value)
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(
                f"line {lineno}: bad value {raw_value!r} for {key!r}"
            ) from None
    return values


def load_config_file(path) -> dict:
    with open(path) as fh:
        return parse_config_text(fh.read())


def sim_config_from_mapping(values: dict, **overrides) -> SimConfig:
    """Build a run config; keys that only make sense for sweeps are rejected."""
    merged = dict(values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    trigger = merged.pop("trigger_threshold", None)
    d_max = merged.pop("d_max", None)
    allowed = {f.name for f in fields(SimConfig)} - {"similarity"}
    unknown = set(merged) - allowed
    if unknown:
        raise ConfigError(f"keys not valid for a single run: {sorted(unknown)}")
    if "c" not in merged or "w" not in merged:
        raise ConfigError("a run needs both c and w")
    config = SimConfig(**merged)
    if trigger is not None or d_max is not None:
        from .agent import SimilaritySpec

        config.similarity = SimilaritySpec(
            d_max=d_max if d_max is not None else float(config.vision_radius),
            trigger_threshold=trigger if trigger is not None else 0.5,
        )
    return config


def sweep_config_from_mapping(values: dict, **overrides) -> SweepConfig:
    merged = dict(values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    allowed = {f.name for f in fields(SweepConfig)}
    unknown = set(merged) - allowed
    if unknown:
        raise ConfigError(f"keys not valid for a sweep: {sorted(unknown)}")
    return SweepConfig(**merged)


def dump_sim_config(config: SimConfig) -> str:
    lines = [
        f"c = {config.c}",
        f"w = {config.w}",
        f"W = {config.W}",
        f"L = {config.L}",
        f"seed = {config.seed}",
        f"max_steps = {config.max_steps}",
        f"vision_radius = {config.vision_radius}",
        f"spawn_margin = {config.spawn_margin}",
        f"trigger_threshold = {config.similarity.trigger_threshold}",
        f"d_max = {config.similarity.d_max}",
    ]
    return "\n".join(lines) + "\n"


def dump_sweep_config(config: SweepConfig) -> str:
    d_max = config.d_max if config.d_max is not None else float(config.vision_radius)
    lines = [
        "c_levels = " + ",".join(str(c) for c in config.c_levels),
        "w_levels = " + ",".join(str(w) for w in config.w_levels),
        f"replicates = {config.replicates}",
        f"base_seed = {config.base_seed}",
        f"W = {config.W}",
        f"L = {config.L}",
        f"max_steps = {config.max_steps}",
        f"vision_radius = {config.vision_radius}",
        f"spawn_margin = {config.spawn_margin}",
        f"threshold_factor = {config.threshold_factor}",
        f"persistence = {config.persistence}",
        f"trigger_threshold = {config.trigger_threshold}",
        f"d_max = {d_max}",
    ]
    return "\n".join(lines) + "\n"

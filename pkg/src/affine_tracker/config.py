"""File-based configuration for the tracker.

A config file is a YAML mapping of ``TrackerConfig`` fields, with the
particle filter settings nested under ``motion``::

    history_length: 5
    subspace_dim: 3
    alpha: 1.0
    distance: affine      # affine | projection | kl | linear
    motion:
      n_particles: 600
      std_x: 4.0

Missing keys keep their defaults; unknown keys are rejected.  Nothing is
read from the environment.  CLI flags are applied on top of the file
with ``TrackerConfig.with_overrides``.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Any

import yaml

from affine_tracker.core.models import DistanceKind, MotionParams, TrackerConfig
from affine_tracker.errors import InvalidInputError

_INT_FIELDS = {"history_length", "subspace_dim", "bag_size", "update_period", "seed"}
_FLOAT_FIELDS = {"alpha", "sigma", "kl_sigma2"}
_MOTION_INT_FIELDS = {"n_particles"}
_MOTION_FLOAT_FIELDS = {"std_x", "std_y", "std_s", "s_min", "s_max"}


def load_config(path: str | Path, base: TrackerConfig | None = None) -> TrackerConfig:
    """Read a YAML config file into a validated ``TrackerConfig``.

    Raises:
        FileNotFoundError: If the path does not exist.
        InvalidInputError: Malformed YAML, unknown keys or invalid values.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise InvalidInputError(f"Config file is not valid YAML ({path}): {exc}") from exc

    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise InvalidInputError(
            f"Config file must be a YAML mapping, got {type(raw).__name__}: {path}"
        )
    return config_from_mapping(raw, base=base, source=str(path))


def config_from_mapping(
    raw: dict[str, Any],
    base: TrackerConfig | None = None,
    source: str = "",
) -> TrackerConfig:
    """Apply a mapping of overrides to ``base`` (defaults when omitted)."""
    base = base or TrackerConfig()
    where = f" ({source})" if source else ""
    changes: dict[str, Any] = {}

    for key, value in raw.items():
        if key == "motion":
            changes["motion"] = _parse_motion(value, base.motion, where)
        elif key == "distance":
            changes["distance"] = _parse_distance(value, where)
        elif key == "normalize":
            if not isinstance(value, bool):
                raise InvalidInputError(f"'normalize' must be true or false{where}")
            changes["normalize"] = value
        elif key in _INT_FIELDS:
            changes[key] = _as_number(key, value, int, where)
        elif key in _FLOAT_FIELDS:
            changes[key] = _as_number(key, value, float, where)
        else:
            raise InvalidInputError(f"Unknown config key '{key}'{where}")

    config = dataclasses.replace(base, **changes)
    config.validate()
    return config


# ------------------------------------------------------------------
# Internal parsing helpers
# ------------------------------------------------------------------

def _parse_motion(raw: Any, base: MotionParams, where: str) -> MotionParams:
    if not isinstance(raw, dict):
        raise InvalidInputError(f"'motion' must be a mapping{where}")
    changes: dict[str, Any] = {}
    for key, value in raw.items():
        if key in _MOTION_INT_FIELDS:
            changes[key] = _as_number(f"motion.{key}", value, int, where)
        elif key in _MOTION_FLOAT_FIELDS:
            changes[key] = _as_number(f"motion.{key}", value, float, where)
        else:
            raise InvalidInputError(f"Unknown config key 'motion.{key}'{where}")
    return dataclasses.replace(base, **changes)


def _parse_distance(value: Any, where: str) -> DistanceKind:
    try:
        return DistanceKind(str(value).lower())
    except ValueError:
        choices = ", ".join(k.value for k in DistanceKind)
        raise InvalidInputError(
            f"'distance' must be one of {choices}, got {value!r}{where}"
        ) from None


def _as_number(key: str, value: Any, kind: type, where: str) -> Any:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidInputError(f"'{key}' must be a number, got {value!r}{where}")
    if kind is int and float(value) != int(value):
        raise InvalidInputError(f"'{key}' must be an integer, got {value!r}{where}")
    return kind(value)

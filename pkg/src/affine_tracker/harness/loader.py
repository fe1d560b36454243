"""Reads benchmark scenarios from YAML.

Everything a run will need is checked on load: the synthetic sequence
fields, every tracker override and every check operator. A bad file
therefore fails before any frame is generated.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Any

import yaml

from affine_tracker.config import config_from_mapping
from affine_tracker.errors import TrackerError
from affine_tracker.evaluation.synthetic import SyntheticSpec
from affine_tracker.harness.assertions import OPERATORS
from affine_tracker.harness.models import Assertion, Scenario, ScenarioRun

_SEQUENCE_FIELDS = frozenset(f.name for f in dataclasses.fields(SyntheticSpec))


def load_scenario(path: str | Path) -> Scenario:
    """Parse one scenario file.

    Raises:
        FileNotFoundError: The file does not exist.
        ValueError: The file is not a valid scenario; the message names it.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Scenario file not found: {path}")
    raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: expected a mapping at top level, got {type(raw).__name__}")
    return _scenario(raw, str(path))


def load_all_scenarios(directory: str | Path) -> list[Scenario]:
    """Every ``*.yaml`` and ``*.yml`` file in ``directory``, by file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectoryError(f"Not a directory: {directory}")
    paths = [*directory.glob("*.yaml"), *directory.glob("*.yml")]
    return [load_scenario(p) for p in sorted(paths, key=lambda p: p.name) if p.is_file()]


def _mapping(value: Any, where: str, what: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise ValueError(f"{where}: {what} must be a mapping")
    return value


def _scenario(raw: dict[str, Any], source: str) -> Scenario:
    name = str(raw.get("name") or "")
    if not name:
        raise ValueError(f"{source}: scenario has no 'name'")
    where = f"{source} [{name}]"

    sequence = _mapping(raw.get("sequence", {}), where, "sequence")
    extra = sorted(set(sequence) - _SEQUENCE_FIELDS)
    if extra:
        raise ValueError(f"{where}: unknown sequence fields: {', '.join(extra)}")
    try:
        SyntheticSpec(**sequence).validate()
    except (TypeError, TrackerError) as exc:
        raise ValueError(f"{where}: invalid sequence: {exc}") from exc

    tail_frames = int(raw.get("tail_frames", 0))
    if tail_frames < 0:
        raise ValueError(f"{where}: tail_frames must be >= 0")

    runs = raw.get("runs")
    if not isinstance(runs, list) or not runs:
        raise ValueError(f"{where}: needs at least one run")

    return Scenario(
        name=name,
        description=str(raw.get("description", "")),
        sequence=dict(sequence),
        threshold=float(raw.get("threshold", 20.0)),
        tail_frames=tail_frames,
        runs=[_run(r, f"{where} run {i}", i) for i, r in enumerate(runs)],
        tags=list(raw.get("tags", [])),
    )


def _run(raw: Any, where: str, index: int) -> ScenarioRun:
    raw = _mapping(raw, where, "run")
    overrides = _mapping(raw.get("tracker", {}), where, "tracker")
    try:
        config_from_mapping(overrides, source=where)
    except TrackerError as exc:
        raise ValueError(str(exc)) from exc
    checks = raw.get("assertions", [])
    if not isinstance(checks, list):
        raise ValueError(f"{where}: assertions must be a list")
    return ScenarioRun(
        label=str(raw.get("label", f"run{index}")),
        tracker=dict(overrides),
        assertions=[_assertion(c, f"{where} assertion {i}") for i, c in enumerate(checks)],
    )


def _assertion(raw: Any, where: str) -> Assertion:
    raw = _mapping(raw, where, "assertion")
    if not raw.get("field"):
        raise ValueError(f"{where}: missing 'field'")
    op = str(raw.get("op", "=="))
    if op not in OPERATORS:
        raise ValueError(f"{where}: unknown operator '{op}' (known: {' '.join(OPERATORS)})")
    return Assertion(
        field=str(raw["field"]),
        op=op,
        value=raw.get("value"),
        label=str(raw.get("label", "")),
    )

"""Records for benchmark scenarios and their results.

Scenario, ScenarioRun and Assertion mirror the YAML files; the result
records hold what a tracking run over the generated sequence produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from affine_tracker.core.models import MetricsReport, TrackerConfig, TrackRecord


@dataclass
class Assertion:
    """A single assertion evaluated after a tracking run.

    Attributes:
        field: Dot-path to a value on the ``RunOutcome``, e.g.
            ``metrics.mean_cle`` or ``tail.max_cle``.
        op: Comparison operator.  One of: ``<``, ``>``, ``<=``, ``>=``,
            ``==``, ``!=``, ``in``, ``between``, ``approx``.
        value: Scalar, list or pair, as the operator needs.
        label: Optional name shown instead of the field path.
    """

    field: str = ""
    op: str = "=="
    value: Any = None
    label: str = ""


@dataclass
class ScenarioRun:
    """One tracker configuration applied to the scenario's sequence.

    Attributes:
        label: Short name shown in reports (e.g. ``default``, ``alpha0``).
        tracker: Config overrides, same keys as a config file.
        assertions: Assertions evaluated on the run's outcome.
    """

    label: str = "default"
    tracker: dict[str, Any] = field(default_factory=dict)
    assertions: list[Assertion] = field(default_factory=list)


@dataclass
class Scenario:
    """A complete benchmark scenario loaded from YAML.

    Attributes:
        name: Short human-readable name.
        description: What this scenario checks.
        sequence: ``SyntheticSpec`` fields of the generated sequence.
        threshold: Precision threshold in pixels.
        tail_frames: Window for the ``tail`` metrics (0 disables them).
        runs: Tracker runs over the same sequence, in order.
        tags: Arbitrary tags for filtering (e.g. ``occlusion``).
    """

    name: str = ""
    description: str = ""
    sequence: dict[str, Any] = field(default_factory=dict)
    threshold: float = 20.0
    tail_frames: int = 0
    runs: list[ScenarioRun] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)


@dataclass
class RunOutcome:
    """What assertions are resolved against.

    Attributes:
        metrics: Metrics over the whole sequence.
        tail: Metrics over the last ``tail_frames`` frames, or ``None``.
        records: The per-frame estimates.
        bag_size: Models in the bag after the last frame.
        config: The effective tracker configuration.
        seconds: Wall-clock time of the tracking call alone.
    """

    metrics: MetricsReport
    tail: MetricsReport | None = None
    records: list[TrackRecord] = field(default_factory=list)
    bag_size: int = 0
    config: TrackerConfig = field(default_factory=TrackerConfig)
    seconds: float = 0.0


@dataclass
class AssertionResult:
    """One check after it was resolved against a run.

    Attributes:
        assertion: The check as loaded.
        passed: Whether the assertion held.
        actual_value: The value that was resolved from the outcome.
        message: One-line summary used by the reporters.
    """

    assertion: Assertion = field(default_factory=Assertion)
    passed: bool = False
    actual_value: Any = None
    message: str = ""


@dataclass
class RunResult:
    """Outcome of one scenario run.

    Attributes:
        run_index: Zero-based index into ``Scenario.runs``.
        label: The run's label.
        outcome: Metrics and records, ``None`` when the run raised.
        error: The error message when the run raised.
        passed_assertions: Assertions that held.
        failed_assertions: Assertions that did not hold.
        duration_seconds: Wall-clock time of the tracking run.
    """

    run_index: int = 0
    label: str = ""
    outcome: RunOutcome | None = None
    error: str = ""
    passed_assertions: list[AssertionResult] = field(default_factory=list)
    failed_assertions: list[AssertionResult] = field(default_factory=list)
    duration_seconds: float = 0.0

    @property
    def all_passed(self) -> bool:
        return not self.error and len(self.failed_assertions) == 0


@dataclass
class ScenarioReport:
    """Full report for one scenario.

    Attributes:
        scenario_name: Name of the scenario.
        scenario_description: Description of the scenario.
        run_results: Per-run outcomes.
        passed: True only if every run completed and every assertion held.
        total_assertions: Checks over all runs.
        passed_count: Checks that held.
        failed_count: Checks that did not hold.
        duration_seconds: Wall-clock time including sequence generation.
        frames: Length of the generated sequence.
    """

    scenario_name: str = ""
    scenario_description: str = ""
    run_results: list[RunResult] = field(default_factory=list)
    passed: bool = False
    total_assertions: int = 0
    passed_count: int = 0
    failed_count: int = 0
    duration_seconds: float = 0.0
    frames: int = 0

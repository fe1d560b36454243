"""Scenario harness for benchmarking the tracker on synthetic sequences.

Provides YAML-driven scenarios so that:
- tracking accuracy bounds are checked as data, not code
- new sequences and configurations need no new tests
- CI detects accuracy regressions automatically

Usage:
    from affine_tracker.harness import ScenarioRunner, load_scenario

    scenario = load_scenario("scenarios/linear_no_occlusion.yaml")
    report = ScenarioRunner().run(scenario)
    print(report.passed)
"""

from affine_tracker.harness.models import (
    Assertion,
    AssertionResult,
    RunOutcome,
    RunResult,
    Scenario,
    ScenarioReport,
    ScenarioRun,
)
from affine_tracker.harness.assertions import evaluate_assertion
from affine_tracker.harness.loader import load_all_scenarios, load_scenario
from affine_tracker.harness.runner import ScenarioRunner
from affine_tracker.harness.reporter import generate_aggregate, generate_json, generate_markdown

__all__ = [
    "Assertion",
    "AssertionResult",
    "RunOutcome",
    "RunResult",
    "Scenario",
    "ScenarioReport",
    "ScenarioRun",
    "evaluate_assertion",
    "load_all_scenarios",
    "load_scenario",
    "ScenarioRunner",
    "generate_aggregate",
    "generate_json",
    "generate_markdown",
]

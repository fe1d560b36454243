"""Markdown and JSON output for scenario reports.

``generate_markdown`` and ``generate_json`` describe one scenario;
``generate_aggregate`` puts every run of every scenario in a single
table so CLE and precision can be compared across configurations.
"""

from __future__ import annotations

import dataclasses
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from affine_tracker.core.models import MetricsReport
from affine_tracker.harness.models import AssertionResult, RunResult, ScenarioReport

_RUN_COLUMNS = ("Run", "Mean CLE", "Precision", "Max CLE", "Tail mean", "Tail max", "Bag", "Time")


def _row(cells: list[str] | tuple[str, ...]) -> str:
    return "| " + " | ".join(cells) + " |"


def _table(header: tuple[str, ...], rows: list[list[str]]) -> list[str]:
    return [_row(header), _row(["---"] * len(header)), *(_row(r) for r in rows)]


def _num(value: float | None) -> str:
    return "-" if value is None else f"{value:.3f}"


def _run_cells(rr: RunResult) -> list[str]:
    if rr.outcome is None:
        return [rr.label, "error", "", "", "", "", "", f"{rr.duration_seconds:.2f}s"]
    m, tail = rr.outcome.metrics, rr.outcome.tail
    return [
        rr.label,
        _num(m.mean_cle),
        _num(m.precision),
        _num(m.max_cle),
        _num(tail.mean_cle if tail else None),
        _num(tail.max_cle if tail else None),
        str(rr.outcome.bag_size),
        f"{rr.duration_seconds:.2f}s",
    ]


def _check_lines(rr: RunResult) -> list[str]:
    marks = [("x", ar) for ar in rr.passed_assertions] + [(" ", ar) for ar in rr.failed_assertions]
    return [f"- [{mark}] {ar.message}" for mark, ar in marks]


def generate_markdown(report: ScenarioReport) -> str:
    """One scenario: header, a metrics row per run, then every check."""
    lines = [
        f"# Scenario: {report.scenario_name}",
        "",
        report.scenario_description,
        "",
        f"- status: {'PASS' if report.passed else 'FAIL'}",
        f"- frames: {report.frames}",
        f"- checks: {report.passed_count}/{report.total_assertions} passed",
        f"- time: {report.duration_seconds:.3f}s",
        "",
        *_table(_RUN_COLUMNS, [_run_cells(rr) for rr in report.run_results]),
    ]
    for rr in report.run_results:
        lines += ["", f"## {rr.label} ({'PASS' if rr.all_passed else 'FAIL'})", ""]
        lines += [f"Run raised: {rr.error}"] if rr.error else _check_lines(rr)
    return "\n".join(lines) + "\n"


def _jsonable(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return _jsonable(dataclasses.asdict(value))
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def _metrics_json(metrics: MetricsReport | None) -> dict[str, Any] | None:
    if metrics is None:
        return None
    return {**_jsonable(metrics), "max_cle": metrics.max_cle}


def _check_json(ar: AssertionResult) -> dict[str, Any]:
    return {
        **_jsonable(ar.assertion),
        "actual": _jsonable(ar.actual_value),
        "passed": ar.passed,
        "message": ar.message,
    }


def generate_json(report: ScenarioReport) -> dict[str, Any]:
    """One scenario as a JSON-compatible dict."""
    runs = []
    for rr in report.run_results:
        outcome = rr.outcome
        runs.append({
            "run_index": rr.run_index,
            "label": rr.label,
            "all_passed": rr.all_passed,
            "error": rr.error,
            "duration_seconds": rr.duration_seconds,
            "tracking_seconds": outcome.seconds if outcome else None,
            "bag_size": outcome.bag_size if outcome else None,
            "config": _jsonable(outcome.config) if outcome else None,
            "metrics": _metrics_json(outcome.metrics if outcome else None),
            "tail": _metrics_json(outcome.tail if outcome else None),
            "checks": [_check_json(ar) for ar in rr.passed_assertions + rr.failed_assertions],
        })
    return {
        "scenario": report.scenario_name,
        "description": report.scenario_description,
        "passed": report.passed,
        "frames": report.frames,
        "passed_count": report.passed_count,
        "failed_count": report.failed_count,
        "duration_seconds": report.duration_seconds,
        "runs": runs,
    }


def generate_aggregate(reports: list[ScenarioReport]) -> str:
    """Every run of every scenario in one table, failures listed below it."""
    ok = sum(r.passed for r in reports)
    checks_ok = sum(r.passed_count for r in reports)
    checks = sum(r.total_assertions for r in reports)
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M UTC")

    rows = [
        [r.scenario_name, *_run_cells(rr)]
        for r in reports
        for rr in r.run_results
    ]
    lines = [
        "# Scenario Harness: Aggregate Report",
        "",
        f"{stamp}. Scenarios {ok}/{len(reports)} passed, checks {checks_ok}/{checks}.",
        "",
        *_table(("Scenario", *_RUN_COLUMNS), rows),
    ]

    failing = [(r, rr) for r in reports for rr in r.run_results if not rr.all_passed]
    if failing:
        lines += ["", "## Failures", ""]
        for r, rr in failing:
            if rr.error:
                detail = [f"raised {rr.error}"]
            else:
                detail = [ar.message for ar in rr.failed_assertions]
            lines += [f"- {r.scenario_name} / {rr.label}: {d}" for d in detail]
    return "\n".join(lines) + "\n"

"""Scenario runner -- the core executor for the harness.

Renders the scenario's synthetic sequence once, tracks it with every
configured run, evaluates the metrics and the run's assertions, and
collects a report.
"""

from __future__ import annotations

import logging
import time

from affine_tracker.config import config_from_mapping
from affine_tracker.core.models import BoxState
from affine_tracker.core.tracker import AffineSubspaceTracker
from affine_tracker.errors import TrackerError
from affine_tracker.evaluation.metrics import evaluate
from affine_tracker.evaluation.synthetic import SyntheticSequence, SyntheticSpec, render_sequence
from affine_tracker.harness.assertions import evaluate_assertion
from affine_tracker.harness.models import (
    AssertionResult,
    RunOutcome,
    RunResult,
    Scenario,
    ScenarioReport,
    ScenarioRun,
)

logger = logging.getLogger(__name__)


class ScenarioRunner:
    """Runs scenarios through the tracker.

    Each run gets a fresh tracker so runs are fully isolated; they share
    the rendered sequence.  The initial box is the first ground-truth box.
    """

    def run(self, scenario: Scenario) -> ScenarioReport:
        """Execute a full scenario and return a report."""
        wall_start = time.monotonic()
        sequence = render_sequence(SyntheticSpec(**scenario.sequence))
        logger.info("Scenario '%s': %d frames", scenario.name, len(sequence.frames))

        run_results = [
            self._execute_run(scenario, run, i, sequence)
            for i, run in enumerate(scenario.runs)
        ]

        passed_count = sum(len(rr.passed_assertions) for rr in run_results)
        failed_count = sum(len(rr.failed_assertions) for rr in run_results)
        wall_elapsed = time.monotonic() - wall_start

        return ScenarioReport(
            scenario_name=scenario.name,
            scenario_description=scenario.description,
            run_results=run_results,
            passed=all(rr.all_passed for rr in run_results),
            total_assertions=passed_count + failed_count,
            passed_count=passed_count,
            failed_count=failed_count,
            duration_seconds=round(wall_elapsed, 3),
            frames=len(sequence.frames),
        )

    # ------------------------------------------------------------------
    # Run execution
    # ------------------------------------------------------------------

    @staticmethod
    def _execute_run(
        scenario: Scenario,
        run: ScenarioRun,
        index: int,
        sequence: SyntheticSequence,
    ) -> RunResult:
        start = time.monotonic()
        first = sequence.truth[0]
        try:
            config = config_from_mapping(run.tracker)
            tracker = AffineSubspaceTracker(config)
            records = tracker.run(
                list(sequence.frames), BoxState.from_box(first.x, first.y, first.w, first.h)
            )
            tracked_seconds = time.monotonic() - start
        except TrackerError as exc:
            logger.warning("Scenario '%s' run '%s' failed: %s", scenario.name, run.label, exc)
            return RunResult(
                run_index=index,
                label=run.label,
                error=str(exc),
                duration_seconds=round(time.monotonic() - start, 3),
            )

        metrics = evaluate(records, sequence.truth, scenario.threshold)
        outcome = RunOutcome(
            metrics=metrics,
            tail=metrics.tail(scenario.tail_frames) if scenario.tail_frames else None,
            records=records,
            bag_size=len(tracker.last_state.bag) if tracker.last_state else 0,
            config=config,
            seconds=tracked_seconds,
        )

        passed: list[AssertionResult] = []
        failed: list[AssertionResult] = []
        for assertion in run.assertions:
            ar = evaluate_assertion(outcome, assertion)
            (passed if ar.passed else failed).append(ar)

        logger.info(
            "Scenario '%s' run '%s': mean_cle=%.3f precision=%.3f",
            scenario.name, run.label, metrics.mean_cle, metrics.precision,
        )
        return RunResult(
            run_index=index,
            label=run.label,
            outcome=outcome,
            passed_assertions=passed,
            failed_assertions=failed,
            duration_seconds=round(time.monotonic() - start, 3),
        )

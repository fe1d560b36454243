"""Checks run against a ``RunOutcome`` after each scenario run.

A check names a dot path into the outcome (``metrics.precision``,
``tail.max_cle``, ``config.motion.n_particles``) and an operator:

    <  >  <=  >=     numeric order
    ==  !=           numeric when both sides parse as floats, else text
    in               membership in a list, compared as text
    between          ``[low, high]``, inclusive
    approx           ``[target, tolerance]``, absolute
"""

from __future__ import annotations

import math
import operator
from collections.abc import Callable
from enum import Enum
from typing import Any

from affine_tracker.harness.models import Assertion, AssertionResult

_MISSING = object()


def _resolve_field(obj: Any, dot_path: str) -> Any:
    """Follow ``dot_path`` through attributes and mapping keys.

    Enum leaves are returned as their values, so ``config.distance``
    reads as ``"affine"``.
    """
    current = obj
    for depth, part in enumerate(dot_path.split(".")):
        if isinstance(current, dict):
            nxt = current.get(part, _MISSING)
        else:
            nxt = getattr(current, part, _MISSING)
        if nxt is _MISSING:
            walked = ".".join(dot_path.split(".")[:depth]) or "<outcome>"
            raise KeyError(f"'{dot_path}': {walked} has no field '{part}'")
        current = nxt
    return current.value if isinstance(current, Enum) else current


def _same(actual: Any, expected: Any) -> bool:
    try:
        return float(actual) == float(expected)
    except (TypeError, ValueError):
        return str(actual) == str(expected)


def _numeric(compare: Callable[[float, float], bool]) -> Callable[[Any, Any], bool]:
    return lambda actual, expected: compare(float(actual), float(expected))


def _between(actual: Any, bounds: Any) -> bool:
    low, high = bounds
    return float(low) <= float(actual) <= float(high)


def _approx(actual: Any, target: Any) -> bool:
    centre, tolerance = target
    return math.isclose(float(actual), float(centre), rel_tol=0.0, abs_tol=float(tolerance))


OPERATORS: dict[str, Callable[[Any, Any], bool]] = {
    "<": _numeric(operator.lt),
    ">": _numeric(operator.gt),
    "<=": _numeric(operator.le),
    ">=": _numeric(operator.ge),
    "==": _same,
    "!=": lambda actual, expected: not _same(actual, expected),
    "in": lambda actual, options: str(actual) in {str(v) for v in options},
    "between": _between,
    "approx": _approx,
}


def evaluate_assertion(outcome: Any, assertion: Assertion) -> AssertionResult:
    """Evaluate one check; failures never raise, they come back as results."""
    name = assertion.label or assertion.field

    def result(passed: bool, actual: Any, message: str) -> AssertionResult:
        return AssertionResult(
            assertion=assertion, passed=passed, actual_value=actual, message=message
        )

    try:
        actual = _resolve_field(outcome, assertion.field)
    except KeyError as exc:
        return result(False, None, f"[FAIL] {name}: unresolved field {exc}")

    check = OPERATORS.get(assertion.op)
    if check is None:
        return result(False, actual, f"[FAIL] {name}: unknown operator '{assertion.op}'")

    try:
        passed = bool(check(actual, assertion.value))
    except (TypeError, ValueError) as exc:
        return result(
            False, actual,
            f"[FAIL] {name}: cannot compare {actual!r} with {assertion.value!r} ({exc})",
        )

    shown = f"{actual:.4f}" if isinstance(actual, float) else repr(actual)
    status = "PASS" if passed else "FAIL"
    return result(
        passed, actual, f"[{status}] {name}: {shown} {assertion.op} {assertion.value!r}"
    )

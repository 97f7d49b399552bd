"""Validation helpers and the exceptions raised on bad parameters.

The helpers are pure and free of side effects so that services, the command
line and the tests can import them without pulling in numpy-heavy modules.
"""
from __future__ import annotations

import math
import re
from decimal import Decimal, InvalidOperation
from typing import Iterable, List

__all__ = [
    "ParameterError",
    "ConstraintError",
    "require",
    "require_range",
    "require_positive_int",
    "parse_magnitude",
    "parse_float_list",
    "log_of",
]


class ParameterError(ValueError):
    """Raised when an operation receives parameters outside its domain."""


class ConstraintError(ParameterError):
    """Raised when ladder parameters violate the construction constraints."""


_MAGNITUDE_REGEX = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_EXACT_FLOAT_LIMIT = 2**53


def require(condition: bool, message: str) -> None:
    """Raise :class:`ParameterError` with *message* unless *condition* holds."""

    if not condition:
        raise ParameterError(message)


def require_range(name: str, value: float, low: float | None = None, high: float | None = None) -> None:
    """Check ``low <= value <= high`` (either bound may be omitted)."""

    if low is not None and value < low:
        raise ParameterError(f"{name} must be >= {low}, got {value}")
    if high is not None and value > high:
        raise ParameterError(f"{name} must be <= {high}, got {value}")


def require_positive_int(name: str, value: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise ParameterError(f"{name} must be >= 1, got {value}")
    return value


def parse_magnitude(text: str | int) -> int:
    """Parse integer flags such as ``1e9`` or ``250000`` exactly.

    Scientific notation is evaluated in decimal arithmetic, so ``1e9`` is the
    integer ``10**9`` rather than a rounded float. Values must be integral and,
    when written with an exponent, at most ``2**53``.
    """

    if isinstance(text, int) and not isinstance(text, bool):
        return text
    raw = str(text).strip().replace("_", "")
    if not _MAGNITUDE_REGEX.match(raw):
        raise ParameterError(f"not an integer magnitude: {text!r}")
    if raw.lstrip("+-").isdigit():
        return int(raw)
    try:
        value = Decimal(raw)
    except InvalidOperation as exc:  # pragma: no cover - regex already filtered
        raise ParameterError(f"not an integer magnitude: {text!r}") from exc
    if value != value.to_integral_value():
        raise ParameterError(f"magnitude must be integral: {text!r}")
    result = int(value)
    if abs(result) > _EXACT_FLOAT_LIMIT:
        raise ParameterError(f"scientific-notation magnitudes are limited to 2^53: {text!r}")
    return result


def parse_float_list(text: str | Iterable[float]) -> List[float]:
    """Parse ``"0.3,0.7,1.0"`` into floats."""

    if not isinstance(text, str):
        return [float(v) for v in text]
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ParameterError("empty list")
    try:
        return [float(item) for item in items]
    except ValueError as exc:
        raise ParameterError(f"not a comma-separated list of numbers: {text!r}") from exc


def log_of(n: int | float) -> float:
    """Natural logarithm that also accepts integers beyond float range."""

    if n <= 0:
        raise ParameterError(f"logarithm of non-positive value {n}")
    return math.log(n)

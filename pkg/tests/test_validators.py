from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from ekshort.utils.validators import (
    ConstraintError,
    ParameterError,
    log_of,
    parse_float_list,
    parse_magnitude,
    require,
    require_positive_int,
    require_range,
)


@pytest.mark.parametrize(
    "text, expected",
    [("1e9", 10**9), ("250000", 250000), ("1_000", 1000), ("2.5e3", 2500), (42, 42), ("9007199254740992", 2**53)],
)
def test_parse_magnitude(text, expected):
    assert parse_magnitude(text) == expected


def test_parse_magnitude_is_exact_beyond_float_rounding():
    assert parse_magnitude("123456789012345678") == 123456789012345678


@pytest.mark.parametrize("text", ["1.5", "abc", "1e-3", "1e17", ""])
def test_parse_magnitude_rejects(text):
    with pytest.raises(ParameterError):
        parse_magnitude(text)


def test_parse_float_list():
    assert parse_float_list("0.3, 0.7,1.0") == [0.3, 0.7, 1.0]
    assert parse_float_list([1, 2]) == [1.0, 2.0]
    with pytest.raises(ParameterError):
        parse_float_list(" , ")
    with pytest.raises(ParameterError):
        parse_float_list("0.3,x")


def test_require_helpers():
    require(True, "unused")
    with pytest.raises(ParameterError, match="boom"):
        require(False, "boom")
    require_range("v", 5, 1, 10)
    with pytest.raises(ParameterError):
        require_range("v", 11, high=10)
    assert require_positive_int("n", 3) == 3
    with pytest.raises(ParameterError):
        require_positive_int("n", True)


def test_constraint_error_is_parameter_error():
    assert issubclass(ConstraintError, ParameterError)
    assert issubclass(ParameterError, ValueError)


def test_log_of_rejects_nonpositive():
    assert log_of(1) == 0.0
    with pytest.raises(ParameterError):
        log_of(0)

from __future__ import annotations

import logging
import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

sys.path.append(str(Path(__file__).resolve().parents[1]))

from ekshort.models.ladder import Ladder
from ekshort.models.params import PrimePhase, TwistSpec
from ekshort.models.window import Window
from ekshort.services import pretentious
from ekshort.services.sieve import base_primes
from ekshort.utils.validators import ParameterError

BASE = base_primes(10**4)
EMPTY_LADDER = Ladder(X=1000, eta=1 / 150, logP=(), logQ=())

phases = st.builds(
    PrimePhase,
    theta=st.floats(min_value=-4.0, max_value=4.0),
    alpha=st.floats(min_value=-3.0, max_value=3.0),
)


def test_distance_to_itself_is_zero():
    assert pretentious.distance_sq(TwistSpec(theta=0.0), 1000, BASE) == 0.0
    assert pretentious.pretentious_distance_sq(PrimePhase(1.3, 0.4), PrimePhase(1.3, 0.4), 1000, BASE) == 0.0


def test_theta_pi_doubles_the_prime_harmonic_sum():
    value = pretentious.distance_sq(TwistSpec(theta=math.pi), 100, BASE)
    expected = 2.0 * float(np.sum(1.0 / BASE.up_to(100)))
    assert value == pytest.approx(expected, rel=1e-12)


def test_distance_is_even_in_the_twist():
    a = pretentious.distance_sq(TwistSpec(theta=0.7, alpha=1.9), 5000, BASE)
    b = pretentious.distance_sq(TwistSpec(theta=-0.7, alpha=-1.9), 5000, BASE)
    assert a == pytest.approx(b, rel=1e-12)


def test_restriction_limits_the_prime_range():
    full = pretentious.distance_sq(TwistSpec(theta=math.pi), 1000, BASE)
    low = pretentious.distance_sq(TwistSpec(theta=math.pi, restriction=(0, 100)), 1000, BASE)
    high = pretentious.distance_sq(TwistSpec(theta=math.pi, restriction=(100, 1000)), 1000, BASE)
    assert low + high == pytest.approx(full, rel=1e-12)
    assert pretentious.distance_sq(TwistSpec(theta=1.0, restriction=(500, 500)), 1000, BASE) == 0.0


def test_reversed_restriction_rejected():
    with pytest.raises(ParameterError):
        TwistSpec(theta=1.0, restriction=(10, 5))


@given(phases, phases, phases)
def test_triangle_inequality(f, g, h):
    d = lambda a, b: math.sqrt(pretentious.pretentious_distance_sq(a, b, 2000, BASE))  # noqa: E731
    assert d(f, h) <= d(f, g) + d(g, h) + 1e-9


def test_distance_interval_at_one_million():
    lower, upper = pretentious.distance_interval(10**6)
    assert lower == pytest.approx(369, rel=0.02)
    assert upper == pytest.approx(4.79e5, rel=0.02)


def test_distance_lower_bound_check_reports_both_sides():
    trivial = pretentious.distance_lower_bound_check(0.0, 0.0, 10**6)
    assert trivial.lhs == 0.0
    assert trivial.rhs == pytest.approx((1 / 3 - 1 / 48 - 0.01) * math.log(math.log(10**6)))

    flipped = pretentious.distance_lower_bound_check(math.pi, 0.0, 10**6)
    table = base_primes(math.floor(flipped.upper))
    primes = table.between(math.floor(flipped.lower), math.floor(flipped.upper))
    assert flipped.lhs == pytest.approx(2.0 * float(np.sum(1.0 / primes)), rel=1e-12)
    assert flipped.lhs > flipped.rhs


def test_distance_interval_degenerates_for_tiny_x():
    with pytest.raises(ParameterError):
        pretentious.distance_lower_bound_check(1.0, 0.0, 2)


def test_korobov_sum():
    plain = pretentious.korobov_sum(0.0, 10, 1000, BASE)
    assert plain.imag == 0.0
    assert plain.real == pytest.approx(float(np.sum(1.0 / BASE.between(10, 1000))), rel=1e-12)
    assert abs(pretentious.korobov_sum(5.0, 10, 1000, BASE)) <= plain.real
    assert pretentious.korobov_sum(1.0, 50, 50, BASE) == 0j


def test_halasz_bound_values_and_domain():
    assert pretentious.halasz_bound(0.0, 1.0) == pytest.approx(2.0)
    assert pretentious.halasz_bound(3.0, 10.0) < pretentious.halasz_bound(1.0, 10.0)
    with pytest.raises(ParameterError):
        pretentious.halasz_bound(1.0, 0.5)
    with pytest.raises(ParameterError):
        pretentious.halasz_bound(-0.1, 2.0)


def test_halasz_grid_spacing():
    grid = pretentious.halasz_grid(2.5)
    assert grid.size == 10
    assert (grid[0], grid[-1]) == (-2.5, 2.5)


def test_halasz_m_is_the_grid_minimum():
    theta, T0 = 1.0, 2.0
    minimum = pretentious.halasz_m(theta, 5000, T0, BASE)
    values = [
        pretentious.distance_sq(TwistSpec(theta=theta, alpha=float(t)), 5000, BASE)
        for t in pretentious.halasz_grid(T0)
    ]
    assert minimum.m == pytest.approx(min(values), rel=1e-9)
    assert minimum.t0 in pretentious.halasz_grid(T0)


def test_halasz_diagnostic_fields():
    report = pretentious.halasz_diagnostic(10**5, math.pi / 2, 2.0)
    assert report.bound == pytest.approx(pretentious.halasz_bound(report.m, 2.0))
    assert report.dyadic_stderr == 0.0
    assert 0.0 <= report.dyadic_abs <= 1.0


def test_finale_parameters_are_reversed_at_desk_scale(caplog):
    with caplog.at_level(logging.WARNING, logger="ekshort.services.pretentious"):
        params = pretentious.finale_parameters(10**9)
    assert not params.ordered
    assert params.H == pytest.approx(math.log(10**9) ** (1 / 48))
    assert "P > Q" in caplog.text


def test_rvh_range_and_harmonic_sum():
    window = pretentious.rvh_range(100, 0.0, 1.0)
    assert (window.first, window.last) == (100, 200)
    assert pretentious.rvh_range(100, 20.0, 1.0) is None
    assert pretentious.harmonic_sum(None) == 0.0
    assert pretentious.harmonic_sum(Window(x=0, h=10)) == pytest.approx(sum(1 / n for n in range(1, 11)), rel=1e-12)


def test_R_vH_reversed_interval_needs_opt_in():
    with pytest.raises(ParameterError):
        pretentious.R_vH(0.0, 1000, 0.0, 1.0, 50.0, 10.0, EMPTY_LADDER, 0.0)


def test_R_vH_empty_interval_reduces_to_harmonic_sum():
    value = pretentious.R_vH(0.0, 1000, 0.0, 1.0, 50.0, 10.0, EMPTY_LADDER, 0.0, allow_empty_interval=True)
    assert value.real == pytest.approx(pretentious.harmonic_sum(pretentious.rvh_range(1000, 0.0, 1.0)), rel=1e-12)
    assert abs(value.imag) < 1e-15


def test_R_vH_weights_by_interval_divisors():
    value = pretentious.R_vH(0.0, 1000, 0.0, 1.0, 2.0, 3.0, EMPTY_LADDER, 0.0)
    expected = sum(1.0 / (n * (1 + (n % 2 == 0) + (n % 3 == 0))) for n in range(1000, 2001))
    assert value.real == pytest.approx(expected, rel=1e-12)


def test_R_vH_respects_trivial_bound():
    window = pretentious.rvh_range(5000, 1.0, 2.0)
    value = pretentious.R_vH(3.7, 5000, 1.0, 2.0, 5.0, 40.0, EMPTY_LADDER, 1.1)
    assert abs(value) <= pretentious.harmonic_sum(window) + 1e-12


def test_R_vH_empty_range_is_zero():
    assert pretentious.R_vH(0.0, 100, 20.0, 1.0, 2.0, 3.0, EMPTY_LADDER, 0.0) == 0j

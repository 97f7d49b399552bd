from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from ekshort.models.distribution import EmpiricalCdf
from ekshort.models.params import TheoryParams
from ekshort.models.window import FULL, OmegaSlice, Sampling, Window
from ekshort.services import empirics, theory
from ekshort.services.sieve import omega_window
from ekshort.utils import cache, rng
from ekshort.utils.validators import ParameterError


@pytest.fixture(scope="module")
def p4() -> TheoryParams:
    return TheoryParams.for_X(10**4)


def _slice(x: int, h: int) -> OmegaSlice:
    w = Window(x=x, h=h)
    return omega_window(w, cache.sieving_table(w.last))


def test_empirical_cdf_small_window(p4):
    slice_ = _slice(1, 9)
    F = empirics.empirical_cdf(slice_, p4)
    assert slice_.histogram == {1: 7, 2: 2}
    y1, y2 = (1 - p4.T) / p4.sqrt_T, (2 - p4.T) / p4.sqrt_T
    assert F.value(y1) == pytest.approx(7 / 9)
    assert F.left_value(y1) == 0.0
    assert F.value(y2) - F.left_value(y2) == pytest.approx(2 / 9)
    assert F.value(np.inf) == 1.0 and F.value(-np.inf) == 0.0


def test_empirical_cdf_monotone(p4):
    F = empirics.empirical_cdf(_slice(10**4, 5000), p4)
    values = F.value(theory.sup_grid())
    assert bool(np.all(np.diff(values) >= 0))


def test_sup_discrepancy_trivial_cases():
    step = EmpiricalCdf.from_points([0.0], [1.0])
    assert empirics.sup_discrepancy(step, step) == 0.0
    assert empirics.sup_discrepancy(step, theory.normal_distribution()) == pytest.approx(0.5)


def test_sup_discrepancy_symmetric_for_steps():
    F = EmpiricalCdf.from_points([0.0, 1.0, 2.5], [1, 2, 1])
    G = EmpiricalCdf.from_points([0.5, 1.0], [3, 1])
    assert empirics.sup_discrepancy(F, G) == empirics.sup_discrepancy(G, F)


def test_phi_X_fits_dyadic_block_better_than_phi():
    p = TheoryParams.for_X(10**6)
    F = empirics.dyadic_cdf(10**6)
    to_phi_X = empirics.sup_discrepancy(F, theory.phi_X_distribution(p))
    to_phi = empirics.sup_discrepancy(F, theory.normal_distribution())
    assert 0 < to_phi_X < to_phi < 1


@pytest.mark.slow
def test_phi_X_fits_dyadic_block_at_1e7_no_worse_than_phi():
    p = TheoryParams.for_X(10**7)
    F = empirics.dyadic_cdf(10**7)
    assert empirics.sup_discrepancy(F, theory.phi_X_distribution(p)) <= empirics.sup_discrepancy(
        F, theory.normal_distribution()
    )


def test_charfn_paths_agree_and_are_bounded(p4):
    slice_ = _slice(10**4, 3000)
    taus = np.linspace(-6, 6, 49)
    curve = empirics.empirical_charfn(slice_, p4, taus)
    np.testing.assert_allclose(curve.values, empirics.charfn_per_integer(slice_, p4, taus), atol=1e-12)
    assert bool(np.all(np.abs(curve.values) <= 1 + 1e-12))
    assert empirics.empirical_charfn(slice_, p4, [0.0]).values[0] == pytest.approx(1.0)


def test_charfn_periodicity():
    p = TheoryParams.for_X(10**6)
    slice_ = _slice(10**6, 4000)
    taus = np.linspace(-3, 3, 100)
    shift = 2 * math.pi * p.sqrt_T
    a = np.exp(1j * taus * p.sqrt_T) * empirics.empirical_charfn(slice_, p, taus).values
    b = np.exp(1j * (taus + shift) * p.sqrt_T) * empirics.empirical_charfn(slice_, p, taus + shift).values
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_dyadic_charfn_full_mode():
    assert empirics.dyadic_charfn(10**4, 0.0).value == 1.0
    plus = empirics.dyadic_charfn(10**4, 0.4).value
    minus = empirics.dyadic_charfn(10**4, -0.4).value
    assert minus == pytest.approx(plus.conjugate(), abs=1e-15)


def test_dyadic_charfn_sampled_mode_has_stderr():
    full = empirics.dyadic_charfn(10**5, 0.5).value
    sampled = empirics.dyadic_charfn(10**5, 0.5, Sampling(count=4000, seed=7))
    assert sampled.stderr > 0
    assert abs(sampled.value - full) < 5 * sampled.stderr


def test_dyadic_stats_rejects_full_mode_above_limit():
    with pytest.raises(ParameterError):
        empirics.dyadic_stats(10**9, FULL)


def test_dyadic_stats_sampled_is_reproducible():
    a = empirics.dyadic_stats(10**9, Sampling(count=200, seed=3))
    b = empirics.dyadic_stats(10**9, Sampling(count=200, seed=3))
    assert a.histogram == b.histogram
    assert sum(a.histogram.values()) == 200


def test_partition_consistency_of_dyadic_cdf(p4):
    X = 10**4
    halves = [_slice(X, X // 2), _slice(X + X // 2, X // 2)]
    F = empirics.dyadic_cdf(X)
    grid = theory.sup_grid()
    mixed = sum(0.5 * empirics.empirical_cdf(s, p4).value(grid) for s in halves)
    np.testing.assert_allclose(F.value(grid), mixed, atol=1e-12)


def test_window_pik():
    slice_ = _slice(0, 10)
    assert empirics.window_pik(slice_, 1) == 7
    assert empirics.window_pik(slice_, 16) == 0
    big = _slice(10**6, 2000)
    assert sum(empirics.window_pik(big, k) for k in range(16)) == 2000


def test_cauchy_recovery_on_random_windows():
    for index in range(10):
        x = rng.window_start(11, index, 10**9, 10**4)
        slice_ = _slice(x, 10**4)
        recovered = empirics.cauchy_recover_counts(slice_, 64)
        np.testing.assert_allclose(recovered, slice_.counts(64), atol=1e-9)


def test_cauchy_recovery_needs_enough_points():
    slice_ = _slice(10**6, 100)
    with pytest.raises(ParameterError):
        empirics.cauchy_recover_counts(slice_, 2)


def test_geometric_taus_and_log_integral():
    taus = empirics.geometric_taus(0.1, 10.0, 64)
    assert taus[0] == pytest.approx(0.1) and taus[-1] == pytest.approx(10.0)
    assert taus.size == 129
    # ∫_{0.1<=|τ|<=10} dτ/|τ| = 2 log 100
    assert empirics.symmetric_log_integral(taus, np.ones_like) == pytest.approx(2 * math.log(100))


def test_esseen_split_pieces_nonnegative(p4):
    slice_ = _slice(10**4, 2000)
    split = empirics.esseen_split(slice_, p4, A=3.0, B=10.0)
    assert min(split.I0, split.I1, split.I2) >= 0
    assert split.total == pytest.approx(split.I0 + split.I1 + split.I2)


def test_esseen_split_of_dyadic_block_has_no_middle_piece(p4):
    block = _slice(10**4, 10**4)
    split = empirics.esseen_split(block, p4, A=3.0, B=10.0)
    assert split.I1 == pytest.approx(0.0, abs=1e-12)

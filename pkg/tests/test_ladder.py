from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

sys.path.append(str(Path(__file__).resolve().parents[1]))

from ekshort.models.ladder import Ladder
from ekshort.models.window import FULL, Sampling, Window
from ekshort.services import ladder
from ekshort.services.sieve import base_primes, omega_single
from ekshort.utils import rng
from ekshort.utils.validators import ConstraintError, ParameterError

HUGE_X = 10 ** (10**6)


def _X_with_log(log_x: float) -> int:
    return int(round(math.exp(log_x)))


def test_single_rung_at_desk_scale():
    # log X = 400: sqrt(log X) = 20 admits Q1 = e^20 and rejects log Q2 = 2^10 * 400.
    L = ladder.build_ladder(_X_with_log(400.0), 10.0, 20.0, strict=False)
    assert L.J == 1
    assert (L.logP[0], L.logQ[0]) == (10.0, 20.0)


def test_strict_ladder_enforces_floor_and_ceiling():
    X = _X_with_log(400.0)
    with pytest.raises(ConstraintError):
        ladder.build_ladder(X, 10.0, 20.0)  # below (log Q1)^(40/eta)
    with pytest.raises(ConstraintError):
        ladder.build_ladder(10**6, 1.0, 5.0, strict=True)  # Q1 above exp(sqrt(log X))


@pytest.mark.parametrize("eta", [1 / 6, 0.5, 0.0, -1.0])
def test_eta_domain(eta):
    with pytest.raises(ConstraintError):
        ladder.build_ladder(10**6, 1.0, 2.0, eta, strict=False)


def test_reversed_or_nonpositive_bounds_rejected():
    with pytest.raises(ConstraintError):
        ladder.build_ladder(10**6, 3.0, 2.0, strict=False)
    with pytest.raises(ConstraintError):
        ladder.build_ladder(10**6, 0.0, 2.0, strict=False)


@given(st.floats(min_value=0.1, max_value=2.0), st.floats(min_value=1.0, max_value=1.2))
def test_ratio_identity_on_all_rungs(logP1, ratio):
    logQ1 = logP1 * ratio
    L = ladder.build_ladder(HUGE_X, logP1, logQ1, strict=False)
    assert L.J >= 1
    for j, (lp, lq) in enumerate(zip(L.logP, L.logQ), start=1):
        assert lp / lq == pytest.approx((logP1 / logQ1) / j**2, rel=1e-12)


def test_max_rungs_caps_the_ladder():
    L = ladder.build_ladder(10**6, 1.0, 2.0, strict=False, max_rungs=0)
    assert L.J == 0


def test_default_ladder_branches():
    X = 10**8
    small = ladder.default_ladder_parameters(X, 20, 0.4, strict=False)
    assert small.branch == "h" and small.logQ1 == pytest.approx(math.log(20))
    assert small.logP1 == pytest.approx(0.1 * math.log(20))
    big = ladder.default_ladder_parameters(X, 10**4, 0.4, strict=False)
    ceiling = math.sqrt(math.log(X))
    assert big.branch == "exp-sqrt-log"
    assert (big.logP1, big.logQ1) == (pytest.approx(0.1 * ceiling), pytest.approx(ceiling))


def test_default_ladder_strict_is_infeasible_at_desk_scale():
    with pytest.raises(ConstraintError):
        ladder.default_ladder(10**8, 50, 0.4)


def test_record_round_trip_and_errors():
    L = Ladder(X=10**7, eta=1 / 150, logP=(3.0,), logQ=(9.0,))
    assert Ladder.from_record(L.to_record()) == L
    with pytest.raises(ParameterError):
        Ladder.from_record("X=1\neta=0.1\nJ=2\n1 2\n")


def test_in_S_basic_cases():
    L = Ladder(X=10**6, eta=1 / 150, logP=(math.log(5),), logQ=(math.log(13),))
    base = base_primes(100)
    assert ladder.in_S(10, L, base)  # 5 | 10
    assert not ladder.in_S(17, L, base)  # prime above Q1
    assert not ladder.in_S(2 * 3 * 17, L, base)
    empty = Ladder(X=10**6, eta=1 / 150, logP=(), logQ=())
    assert ladder.in_S(17, empty, base)


def test_in_S_window_matches_factorisation_path():
    L = ladder.build_ladder(10**6, 2.0, 4.0, strict=False)
    base = base_primes(1000)
    gen = rng.generator(5, 0)
    starts = gen.integers(10**6, 2 * 10**6, size=5)
    for x in starts:
        w = Window(x=int(x), h=400)
        vectorised = ladder.in_S_window(w, L)
        direct = [ladder.in_S(int(n), L, base) for n in w.integers()]
        assert vectorised.tolist() == direct


def test_complement_density_empty_ladder():
    empty = Ladder(X=10**4, eta=1 / 150, logP=(), logQ=())
    assert ladder.complement_density(10**4, empty).measured == 0.0


def test_complement_density_prime_free_interval():
    # [P1, Q1] = [24, 28] holds no prime, so nothing is in S.
    L = Ladder(X=10**4, eta=1 / 150, logP=(math.log(24),), logQ=(math.log(28),))
    report = ladder.complement_density(10**4, L)
    assert report.measured == 1.0
    assert report.predicted == 1.0


def _outside_count(X: int, logP: float, logQ: float) -> int:
    primes = base_primes(int(math.exp(logQ)) + 1).primes
    primes = primes[(np.log(primes) >= logP) & (np.log(primes) <= logQ)]
    hit = np.zeros(X, dtype=bool)  # hit[i] covers n = X + 1 + i
    for p in primes.tolist():
        hit[(-(X + 1)) % p :: p] = True
    return int(X - hit.sum())


def test_complement_density_full_matches_exact_count():
    L = ladder.build_ladder(10**6, 3.0, 9.0, strict=False)
    report = ladder.complement_density(10**6, L)
    assert report.mode == "full"
    assert report.measured == _outside_count(10**6, 3.0, 9.0) / 10**6


@pytest.mark.slow
def test_complement_density_at_1e7_sits_above_independent_product():
    L = ladder.build_ladder(10**7, 3.0, 9.0, strict=False)
    report = ladder.complement_density(10**7, L)
    assert report.measured == _outside_count(10**7, 3.0, 9.0) / 10**7
    assert report.measured == pytest.approx(0.4064, abs=1e-4)
    assert report.predicted == pytest.approx(0.3644, abs=1e-4)


def test_complement_density_sampled_within_three_stderr():
    L = ladder.build_ladder(10**5, 2.0, 5.0, strict=False)
    full = ladder.complement_density(10**5, L, FULL)
    sampled = ladder.complement_density(10**5, L, Sampling(count=20000, seed=9))
    assert sampled.stderr > 0
    assert abs(sampled.measured - full.measured) <= 3 * sampled.stderr


def test_complement_density_sampled_agrees_with_in_S_across_blocks():
    # 3000 samples and ~6000 rung primes span several blocks of both kinds.
    X = 10**6
    L = Ladder(X=X, eta=1 / 150, logP=(3.0,), logQ=(11.0,))
    report = ladder.complement_density(X, L, Sampling(count=3000, seed=5))
    ns = rng.uniform_integers(5, rng.LADDER_SAMPLE_STREAM, X + 1, 2 * X, 3000)
    base = base_primes(int(math.exp(11.0)) + 1)
    members = [ladder.in_S(int(n), L, base) for n in ns]
    assert report.measured == pytest.approx(1.0 - float(np.mean(members)), abs=1e-15)


def test_complement_density_small_sample_rejected():
    L = ladder.build_ladder(10**5, 2.0, 5.0, strict=False)
    with pytest.raises(ParameterError):
        ladder.complement_density(10**5, L, Sampling(count=999, seed=1))


def test_inclusion_exclusion_random_weights():
    L = ladder.build_ladder(10**6, 3.0, 5.0, strict=False)
    w = Window(x=10**6, h=10**4)
    gen = rng.generator(17, 0)
    weights = gen.standard_normal(w.h) + 1j * gen.standard_normal(w.h)
    check = ladder.inclusion_exclusion_check(w, L, weights)
    assert check.passed


def test_inclusion_exclusion_counts_members_with_unit_weights():
    L = ladder.build_ladder(10**6, 3.0, 5.0, strict=False)
    w = Window(x=10**6, h=3000)
    check = ladder.inclusion_exclusion_check(w, L, np.ones(w.h))
    members = int(ladder.in_S_window(w, L).sum())
    assert check.lhs == members
    assert check.rhs == pytest.approx(members)


def test_inclusion_exclusion_two_rungs():
    L = Ladder(X=10**6, eta=1 / 150, logP=(math.log(2), math.log(11)), logQ=(math.log(7), math.log(31)))
    w = Window(x=10**6, h=2000)
    check = ladder.inclusion_exclusion_check(w, L, np.arange(w.h, dtype=float))
    assert check.passed


def test_bound_shape():
    L = Ladder(X=10**7, eta=1 / 150, logP=(3.0,), logQ=(9.0,))
    assert ladder.ladder_bound_shape(L) == pytest.approx(1 / 3)
    assert ladder.ladder_bound_shape(Ladder(X=10**7, eta=0.1, logP=(), logQ=())) == 0.0


def test_omega_oracle_agrees_with_membership_primes():
    # 13 * 10007 has its only small factor inside [5, 13].
    L = Ladder(X=10**6, eta=1 / 150, logP=(math.log(5),), logQ=(math.log(13),))
    n = 13 * 10007
    assert omega_single(n) == 2
    assert ladder.in_S(n, L, base_primes(100))


def test_second_rung_appears_when_log_X_is_large():
    # sqrt(log X) ~ 1517 admits log Q2 = 2^10 and stops before log Q3 = 3^14.
    L = ladder.build_ladder(HUGE_X, 0.5, 1.0, strict=False)
    assert L.J == 2
    assert L.logP[1] == pytest.approx(2**8 * 0.5)
    assert L.logQ[1] == pytest.approx(2**10)
    assert L.logP[1] / L.logQ[1] == pytest.approx(0.5 / 4)

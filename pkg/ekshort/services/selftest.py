"""Fast invariant suite behind the ``selftest`` subcommand."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from ekshort.models.experiment import ExperimentOutcome
from ekshort.models.params import TheoryParams, TwistSpec
from ekshort.models.window import Window
from ekshort.services import empirics, ladder, pretentious, sieve, theory
from ekshort.utils import cache, rng

logger = logging.getLogger(__name__)

_SELFTEST_SEED = 20240101


@dataclass(frozen=True)
class CheckResult:
    check: str
    passed: bool
    detail: str

    def row(self) -> dict:
        return {"check": self.check, "passed": self.passed, "detail": self.detail}


def _check_small_primes() -> Tuple[bool, str]:
    primes = sieve.base_primes(10).primes.tolist()
    count = len(sieve.base_primes(10**5))
    return primes == [2, 3, 5, 7] and count == 9592, f"primes<=10={primes}, pi(1e5)={count}"


def _check_sieve_oracle() -> Tuple[bool, str]:
    w = Window(x=10**11, h=2000)
    slice_ = sieve.omega_window(w, cache.sieving_table(w.last))
    oracle = np.array([sieve.omega_single(int(n)) for n in w.integers()])
    mismatches = int(np.sum(slice_.omegas != oracle))
    return mismatches == 0, f"mismatches={mismatches} on (1e11, 1e11+2000]"


def _check_mertens() -> Tuple[bool, str]:
    value = theory.mertens_constant()
    return abs(value - 0.261497) < 5e-7, f"c1={value:.9f}"


def _check_charfn_paths() -> Tuple[bool, str]:
    p = TheoryParams.for_X(10**6)
    w = Window(x=10**6, h=5000)
    slice_ = sieve.omega_window(w, cache.sieving_table(w.last))
    taus = np.linspace(-5.0, 5.0, 41)
    via_hist = empirics.empirical_charfn(slice_, p, taus).values
    via_ints = empirics.charfn_per_integer(slice_, p, taus)
    gap = float(np.max(np.abs(via_hist - via_ints)))
    return gap <= 1e-12, f"max gap={gap:.3g}"


def _check_periodicity() -> Tuple[bool, str]:
    p = TheoryParams.for_X(10**6)
    w = Window(x=10**6, h=5000)
    slice_ = sieve.omega_window(w, cache.sieving_table(w.last))
    period = 2.0 * math.pi * p.sqrt_T
    taus = np.linspace(-3.0, 3.0, 100)
    f0 = np.exp(1j * taus * p.sqrt_T) * empirics.empirical_charfn(slice_, p, taus).values
    shifted = taus + period
    f1 = np.exp(1j * shifted * p.sqrt_T) * empirics.empirical_charfn(slice_, p, shifted).values
    gap = float(np.max(np.abs(f1 - f0)))
    return gap <= 1e-9, f"max gap={gap:.3g}"


def _check_cauchy() -> Tuple[bool, str]:
    worst = 0.0
    for index in range(5):
        x = rng.window_start(_SELFTEST_SEED, index, 10**9, 10**4)
        w = Window(x=x, h=10**4)
        slice_ = sieve.omega_window(w, cache.sieving_table(w.last))
        recovered = empirics.cauchy_recover_counts(slice_)
        exact = slice_.counts(recovered.size).astype(float)
        worst = max(worst, float(np.max(np.abs(recovered - exact))))
    return worst <= 1e-9, f"max error={worst:.3g} over 5 windows"


def _check_fourier() -> Tuple[bool, str]:
    p = TheoryParams.for_X(10**4)
    taus = np.linspace(-5.0, 5.0, 21)
    numeric = theory.fourier_stieltjes(theory.phi_X_distribution(p), taus)
    closed = theory.char_phi_X(taus, p)
    gap = float(np.max(np.abs(numeric - closed)))
    return gap <= 1e-6, f"max gap={gap:.3g}"


def _check_inclusion_exclusion() -> Tuple[bool, str]:
    L = ladder.build_ladder(10**6, 3.0, 5.0, strict=False, max_rungs=1)
    w = Window(x=10**6, h=2000)
    gen = rng.generator(_SELFTEST_SEED, 0)
    weights = gen.standard_normal(w.h) + 1j * gen.standard_normal(w.h)
    result = ladder.inclusion_exclusion_check(w, L, weights)
    return result.passed, f"|lhs-rhs|={abs(result.lhs - result.rhs):.3g}, J={L.J}"


def _check_distance() -> Tuple[bool, str]:
    base = cache.sieving_table(10**6)
    zero = pretentious.distance_sq(TwistSpec(theta=0.0, alpha=0.0), 1000, base)
    pi_sum = pretentious.distance_sq(TwistSpec(theta=math.pi, alpha=0.0), 100, base)
    expected = 2.0 * float(np.sum(1.0 / base.up_to(100)))
    ok = zero == 0.0 and abs(pi_sum - expected) <= 1e-12
    return ok, f"self={zero}, theta=pi sum={pi_sum:.12f}"


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("small-primes", _check_small_primes),
    ("sieve-oracle", _check_sieve_oracle),
    ("mertens-constant", _check_mertens),
    ("charfn-paths", _check_charfn_paths),
    ("periodicity", _check_periodicity),
    ("cauchy-dft", _check_cauchy),
    ("fourier-stieltjes", _check_fourier),
    ("inclusion-exclusion", _check_inclusion_exclusion),
    ("distance", _check_distance),
]


def run_selftest() -> ExperimentOutcome:
    results: List[CheckResult] = []
    for name, check in CHECKS:
        passed, detail = check()
        level = logging.INFO if passed else logging.ERROR
        logger.log(level, "selftest %s: %s (%s)", name, "ok" if passed else "FAILED", detail)
        results.append(CheckResult(check=name, passed=bool(passed), detail=detail))
    failed = [r.check for r in results if not r.passed]
    return ExperimentOutcome(
        subcommand="selftest",
        rows=[r.row() for r in results],
        summary={"checks": len(results), "failed": failed, "passed": not failed},
    )

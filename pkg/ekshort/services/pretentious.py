"""Pretentious distances, the Halász-type bound and Dirichlet sums over the ladder set."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import digamma

from ekshort.models.ladder import Ladder
from ekshort.models.params import PrimePhase, TwistSpec
from ekshort.models.window import FULL, Mode, PrimeTable, Window
from ekshort.services import empirics
from ekshort.services.ladder import in_S_window
from ekshort.services.sieve import omega_window, prime_divisor_counts, primes_in_range
from ekshort.utils import cache
from ekshort.utils.constants import (
    DISTANCE_EPSILON,
    FULL_ENUMERATION_LIMIT,
    HALASZ_POINTS_PER_T0,
    MAX_PRIME_LIMIT,
    SEGMENT_LENGTH,
)
from ekshort.utils.validators import ParameterError, log_of, require

logger = logging.getLogger(__name__)

_HALASZ_ROW_BLOCK = 16


def _primes_between(a: float, b: float, base: PrimeTable) -> np.ndarray:
    """Primes ``a < p <= b`` from *base*, which must reach ``b``."""

    top = math.floor(b)
    if top > MAX_PRIME_LIMIT:
        raise ParameterError(f"prime sums are limited to 10^9, got {top}")
    if base.limit < top:
        if not base.sieves_up_to(top):
            raise ParameterError(f"base table up to {base.limit} does not cover primes up to {top}")
        return primes_in_range(max(math.floor(a), 0), top, base)
    return base.between(math.floor(a), top)


def _twist_terms(primes: np.ndarray, theta: float, alpha: float) -> np.ndarray:
    p = primes.astype(float)
    return (1.0 - np.cos(theta - alpha * np.log(p))) / p


def distance_sq(spec: TwistSpec, x: int, base: PrimeTable) -> float:
    """``Σ_{p <= x} (1 - cos(θ - α log p))/p``, optionally restricted to ``(a, b]``."""

    low, high = 0.0, float(x)
    if spec.restriction is not None:
        low = max(low, spec.restriction[0])
        high = min(high, spec.restriction[1])
    if high <= low:
        return 0.0
    return float(np.sum(_twist_terms(_primes_between(low, high, base), spec.theta, spec.alpha)))


def pretentious_distance_sq(f: PrimePhase, g: PrimePhase, x: int, base: PrimeTable) -> float:
    """``Σ_{p <= x} (1 - Re f(p) conj(g(p)))/p`` for unimodular prime phases."""

    spec = TwistSpec(theta=f.theta - g.theta, alpha=g.alpha - f.alpha)
    return distance_sq(spec, x, base)


@dataclass(frozen=True)
class DistanceCheck:
    lower: float
    upper: float
    lhs: float
    rhs: float


def distance_interval(x: int, eps: float = DISTANCE_EPSILON) -> Tuple[float, float]:
    """``(exp((log x)^{2/3+ε}), exp((log x)^{1-1/48})]``."""

    log_x = log_of(x)
    return math.exp(log_x ** (2.0 / 3.0 + eps)), math.exp(log_x ** (1.0 - 1.0 / 48.0))


def distance_lower_bound_check(
    theta: float, alpha: float, x: int, eps: float = DISTANCE_EPSILON, base: Optional[PrimeTable] = None
) -> DistanceCheck:
    """Restricted distance against ``(1/3 - 1/48 - ε) log log x``; nothing is asserted."""

    lower, upper = distance_interval(x, eps)
    if not lower < upper:
        raise ParameterError(f"degenerate interval ({lower:.6g}, {upper:.6g}] at x = {x}")
    table = base or cache.sieving_table(math.floor(upper))
    lhs = distance_sq(TwistSpec(theta=theta, alpha=alpha, restriction=(lower, upper)), math.floor(upper), table)
    rhs = (1.0 / 3.0 - 1.0 / 48.0 - eps) * math.log(log_of(x))
    return DistanceCheck(lower=lower, upper=upper, lhs=lhs, rhs=rhs)


def korobov_sum(alpha: float, a: int, b: int, base: PrimeTable) -> complex:
    """``Σ_{a<p<=b} p^{-1-iα}``; reported, never bounded."""

    if b <= a:
        return 0j
    primes = _primes_between(a, b, base).astype(float)
    return complex(np.sum(np.exp(-1j * alpha * np.log(primes)) / primes))


# ---------------------------------------------------------------------------
# Halász-type bound
# ---------------------------------------------------------------------------


def halasz_bound(m: float, T0: float) -> float:
    """``(1 + m) e^{-m} + 1/T0``."""

    require(T0 >= 1, f"T0 must be >= 1, got {T0}")
    require(m >= 0, f"m must be >= 0, got {m}")
    return (1.0 + m) * math.exp(-m) + 1.0 / T0


def halasz_grid(T0: float) -> np.ndarray:
    """``4·T0`` equally spaced points on ``[-T0, T0]``."""

    return np.linspace(-T0, T0, max(2, math.ceil(HALASZ_POINTS_PER_T0 * T0)))


@dataclass(frozen=True)
class HalaszMinimum:
    m: float
    t0: float


def halasz_m(theta: float, x: int, T0: float, base: PrimeTable) -> HalaszMinimum:
    """Minimum over the ``t0``-grid of ``Σ_{p <= x} (1 - cos(θ - t0 log p))/p``."""

    require(T0 >= 1, f"T0 must be >= 1, got {T0}")
    primes = _primes_between(0, x, base).astype(float)
    log_p = np.log(primes)
    grid = halasz_grid(T0)
    values = np.empty(grid.size)
    for start in range(0, grid.size, _HALASZ_ROW_BLOCK):
        ts = grid[start : start + _HALASZ_ROW_BLOCK]
        values[start : start + ts.size] = ((1.0 - np.cos(theta - np.outer(ts, log_p))) / primes).sum(axis=1)
    best = int(np.argmin(values))
    return HalaszMinimum(m=float(values[best]), t0=float(grid[best]))


@dataclass(frozen=True)
class HalaszReport:
    m: float
    t0: float
    bound: float
    dyadic_abs: float
    dyadic_stderr: float


def halasz_diagnostic(X: int, theta: float, T0: float, mode: Mode = FULL) -> HalaszReport:
    """Compare ``|(1/X) Σ e^{iθω(n)}|`` with the Halász-type bound at ``x = X``."""

    minimum = halasz_m(theta, X, T0, cache.sieving_table(X))
    mean = empirics.dyadic_charfn(X, theta, mode)
    return HalaszReport(
        m=minimum.m,
        t0=minimum.t0,
        bound=halasz_bound(minimum.m, T0),
        dyadic_abs=abs(mean.value),
        dyadic_stderr=mean.stderr,
    )


# ---------------------------------------------------------------------------
# Dirichlet sums R_{v,H}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinaleParameters:
    logP: float
    logQ: float
    H: float

    @property
    def ordered(self) -> bool:
        return self.logP <= self.logQ


def finale_parameters(X: int) -> FinaleParameters:
    """``P = exp((log X)^{1-1/48})``, ``Q = exp(log X / log log X)``, ``H = (log X)^{1/48}``."""

    log_x = log_of(X)
    params = FinaleParameters(
        logP=log_x ** (1.0 - 1.0 / 48.0),
        logQ=log_x / math.log(log_x),
        H=log_x ** (1.0 / 48.0),
    )
    if not params.ordered:
        logger.warning("Asymptotic parameters give P > Q at X=%d (log P=%.4g, log Q=%.4g)", X, params.logP, params.logQ)
    return params


def rvh_range(X: int, v: float, H: float) -> Optional[Window]:
    """Integers of ``[X e^{-v/H}, 2X e^{-v/H}]`` as a window, or None when empty."""

    require(H > 0, f"H must be positive, got {H}")
    scale = math.exp(-v / H)
    first = max(math.ceil(X * scale), 1)
    last = math.floor(2 * X * scale)
    if last < first:
        return None
    return Window(x=first - 1, h=last - first + 1)


def harmonic_sum(window: Optional[Window]) -> float:
    """``Σ 1/n`` over the window (the trivial bound on ``|R_{v,H}|``)."""

    if window is None:
        return 0.0
    return float(digamma(window.last + 1) - digamma(window.first))


def R_vH(
    u: float,
    X: int,
    v: float,
    H: float,
    P: float,
    Q: float,
    ladder: Ladder,
    theta: float,
    *,
    allow_empty_interval: bool = False,
) -> complex:
    """``Σ_{n in S} e^{iθω(n)} n^{-1-iu} / (#{p in [P, Q] : p | n} + 1)`` over the scaled dyadic range.

    With ``allow_empty_interval`` a reversed ``[P, Q]`` is read as an empty
    prime set, so every denominator is 1.
    """

    if P > Q and not allow_empty_interval:
        raise ParameterError(f"P = {P:.6g} exceeds Q = {Q:.6g}")
    window = rvh_range(X, v, H)
    if window is None:
        return 0j
    if window.h > FULL_ENUMERATION_LIMIT:
        raise ParameterError(f"summation range of {window.h} integers exceeds the sieve budget")

    table = cache.sieving_table(window.last)
    interval = np.empty(0, dtype=np.int64)
    if P <= Q and math.floor(Q) >= max(math.ceil(P), 2):
        interval = primes_in_range(max(math.ceil(P) - 1, 0), math.floor(Q), cache.sieving_table(math.floor(Q)))

    total = 0j
    lo = window.x
    while lo < window.last:
        chunk = Window(x=lo, h=min(SEGMENT_LENGTH, window.last - lo))
        omegas = omega_window(chunk, table).omegas.astype(float)
        members = in_S_window(chunk, ladder)
        weight = 1.0 / (prime_divisor_counts(chunk, interval) + 1.0)
        log_n = np.log(chunk.integers().astype(float))
        terms = np.exp(1j * theta * omegas - (1.0 + 1j * u) * log_n) * weight
        total += complex(np.sum(terms[members]))
        lo = chunk.last
    return total

"""Construction of the factor-interval ladder, membership and sieve densities."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ekshort.models.ladder import Ladder
from ekshort.models.window import FULL, Mode, PrimeTable, Sampling, Window
from ekshort.services.sieve import prime_divisor_counts, primes_in_range
from ekshort.utils import cache, rng
from ekshort.utils.constants import (
    ETA_DEFAULT,
    ETA_MAX,
    FULL_ENUMERATION_LIMIT,
    MIN_DENSITY_SAMPLES,
    SEGMENT_LENGTH,
)
from ekshort.utils.validators import ConstraintError, ParameterError, log_of

logger = logging.getLogger(__name__)

_MEMBERSHIP_PRIME_BLOCK = 4096
_MEMBERSHIP_SAMPLE_BLOCK = 1024


def _rung(j: int, logP1: float, logQ1: float) -> Tuple[float, float]:
    logP = j ** (4 * j) * logQ1 ** (j - 1) * logP1
    logQ = j ** (4 * j + 2) * logQ1**j
    return float(logP), float(logQ)


def build_ladder(
    X: int,
    logP1: float,
    logQ1: float,
    eta: float = ETA_DEFAULT,
    *,
    strict: bool = True,
    max_rungs: Optional[int] = None,
) -> Ladder:
    """The maximal ladder grown from ``(log P₁, log Q₁)``.

    ``strict`` enforces ``(log Q₁)^{40/η} <= P₁ <= Q₁ <= exp(sqrt(log X))``.
    Otherwise only ``0 < log P₁ <= log Q₁`` is required, the first rung is
    always kept and later rungs are added while ``log Q_j`` stays below
    ``max(sqrt(log X), log Q₁)``.
    """

    if X < 20:
        raise ParameterError(f"X must be >= 20, got {X}")
    if not 0.0 < eta < ETA_MAX:
        raise ConstraintError(f"eta must lie in (0, 1/6), got {eta}")
    if not 0.0 < logP1 <= logQ1:
        raise ConstraintError(f"need 0 < log P1 <= log Q1, got ({logP1}, {logQ1})")
    if max_rungs is not None and max_rungs < 0:
        raise ParameterError("max_rungs must be >= 0")

    ceiling = math.sqrt(log_of(X))
    if strict:
        if logQ1 > ceiling:
            raise ConstraintError(f"log Q1 = {logQ1} exceeds sqrt(log X) = {ceiling:.6g}")
        if logQ1 < 1.0 or logP1 < (40.0 / eta) * math.log(logQ1):
            raise ConstraintError(
                f"P1 is below the floor (log Q1)^(40/eta): log P1 = {logP1}, "
                f"needs >= {(40.0 / eta) * math.log(max(logQ1, 1.0)):.6g}"
            )
        limit = ceiling
    else:
        limit = max(ceiling, logQ1)

    logP: List[float] = []
    logQ: List[float] = []
    j = 1
    while max_rungs is None or j <= max_rungs:
        lp, lq = _rung(j, logP1, logQ1)
        if lq > limit:
            break
        logP.append(lp)
        logQ.append(lq)
        j += 1
    logger.debug("Ladder for X=%d has J=%d rungs", X, len(logP))
    return Ladder(X=X, eta=eta, logP=tuple(logP), logQ=tuple(logQ))


@dataclass(frozen=True)
class LadderParameters:
    logP1: float
    logQ1: float
    branch: str


def default_ladder_parameters(
    X: int, h: int, delta: float, eta: float = ETA_DEFAULT, *, strict: bool = True
) -> LadderParameters:
    """``Q₁ = min(h, exp(sqrt(log X)))`` and ``P₁ = max(h^{δ/4}, (log h)^{40/η})``,
    or ``P₁ = Q₁^{δ/4}`` when ``h > exp(sqrt(log X))``. Without ``strict`` the
    ``(log h)^{40/η}`` floor is dropped.
    """

    if h < 2:
        raise ParameterError(f"h must be >= 2, got {h}")
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    ceiling = math.sqrt(log_of(X))
    log_h = math.log(h)
    if log_h <= ceiling:
        logP1 = delta / 4.0 * log_h
        if strict:
            logP1 = max(logP1, (40.0 / eta) * math.log(log_h))
        return LadderParameters(logP1=logP1, logQ1=log_h, branch="h")
    return LadderParameters(logP1=delta / 4.0 * ceiling, logQ1=ceiling, branch="exp-sqrt-log")


def default_ladder(
    X: int, h: int, delta: float, eta: float = ETA_DEFAULT, *, strict: bool = True
) -> Ladder:
    params = default_ladder_parameters(X, h, delta, eta, strict=strict)
    return build_ladder(X, params.logP1, params.logQ1, eta, strict=strict)


def ladder_bound_shape(ladder: Ladder) -> float:
    """``log P₁ / log Q₁`` (0 for the empty ladder)."""

    if ladder.J == 0:
        return 0.0
    return ladder.logP[0] / ladder.logQ[0]


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


def rung_primes(ladder: Ladder, base: Optional[PrimeTable] = None) -> List[np.ndarray]:
    """Primes ``P_j <= p <= Q_j`` for each rung."""

    out: List[np.ndarray] = []
    for lo, hi in ladder.prime_bounds():
        if hi < max(lo, 2):
            out.append(np.empty(0, dtype=np.int64))
            continue
        table = base if base is not None and base.limit >= hi else cache.sieving_table(hi)
        out.append(primes_in_range(max(lo - 1, 0), hi, table))
    return out


def in_S(n: int, ladder: Ladder, base: PrimeTable) -> bool:
    """True when ``n`` has a prime factor in every ``[P_j, Q_j]``."""

    if ladder.J == 0:
        return True
    if base.limit < ladder.max_prime():
        raise ParameterError(f"base table up to {base.limit} does not reach Q_J = {ladder.max_prime()}")
    value = np.int64(n)
    for lo, hi in ladder.prime_bounds():
        ps = base.between(lo - 1, hi)
        if not bool(np.any(value % ps == 0)):
            return False
    return True


def _rung_hits(window: Window, primes_per_rung: Sequence[np.ndarray]) -> List[np.ndarray]:
    return [prime_divisor_counts(window, ps) > 0 for ps in primes_per_rung]


def in_S_window(window: Window, ladder: Ladder, base: Optional[PrimeTable] = None) -> np.ndarray:
    """Membership of every integer of *window*, marked by sieving each rung."""

    members = np.ones(window.h, dtype=bool)
    for hit in _rung_hits(window, rung_primes(ladder, base)):
        members &= hit
    return members


def _members_of(ns: np.ndarray, primes_per_rung: Sequence[np.ndarray]) -> np.ndarray:
    # Temporaries are at most one sample block by one prime block.
    members = np.ones(ns.size, dtype=bool)
    for ps in primes_per_rung:
        for lo in range(0, ns.size, _MEMBERSHIP_SAMPLE_BLOCK):
            part = ns[lo : lo + _MEMBERSHIP_SAMPLE_BLOCK]
            hit = np.zeros(part.size, dtype=bool)
            for start in range(0, ps.size, _MEMBERSHIP_PRIME_BLOCK):
                block = ps[start : start + _MEMBERSHIP_PRIME_BLOCK]
                hit |= np.any(part[:, None] % block[None, :] == 0, axis=1)
            members[lo : lo + part.size] &= hit
    return members


# ---------------------------------------------------------------------------
# Densities and the inclusion–exclusion identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityReport:
    measured: float
    predicted: float
    stderr: float
    mode: str


def predicted_complement(primes_per_rung: Sequence[np.ndarray]) -> float:
    """``1 - ∏_j (1 - ∏_{p in rung j} (1 - 1/p))``, rungs treated as independent."""

    inside = 1.0
    for ps in primes_per_rung:
        miss = math.exp(float(np.sum(np.log1p(-1.0 / ps.astype(float))))) if ps.size else 1.0
        inside *= 1.0 - miss
    return 1.0 - inside


def complement_density(X: int, ladder: Ladder, sample: Mode = FULL) -> DensityReport:
    """Density of ``(X, 2X]`` outside the ladder set, measured and predicted."""

    if ladder.J == 0:
        return DensityReport(measured=0.0, predicted=0.0, stderr=0.0, mode="full" if sample == FULL else "sampled")
    primes_per_rung = rung_primes(ladder)
    predicted = predicted_complement(primes_per_rung)

    if sample == FULL:
        if X > FULL_ENUMERATION_LIMIT:
            raise ParameterError(f"full enumeration is limited to X <= {FULL_ENUMERATION_LIMIT}; use sampling")
        outside = 0
        lo = X
        while lo < 2 * X:
            chunk = Window(x=lo, h=min(SEGMENT_LENGTH, 2 * X - lo))
            members = np.ones(chunk.h, dtype=bool)
            for hit in _rung_hits(chunk, primes_per_rung):
                members &= hit
            outside += int(chunk.h - members.sum())
            lo = chunk.last
        return DensityReport(measured=outside / X, predicted=predicted, stderr=0.0, mode="full")

    if not isinstance(sample, Sampling):
        raise ParameterError(f"unknown sampling mode {sample!r}")
    if sample.count < MIN_DENSITY_SAMPLES:
        raise ParameterError(f"sampling needs at least {MIN_DENSITY_SAMPLES} integers, got {sample.count}")
    ns = rng.uniform_integers(sample.seed, rng.LADDER_SAMPLE_STREAM, X + 1, 2 * X, sample.count)
    share = 1.0 - float(_members_of(ns, primes_per_rung).mean())
    stderr = math.sqrt(share * (1.0 - share) / sample.count)
    return DensityReport(measured=share, predicted=predicted, stderr=stderr, mode="sampled")


@dataclass(frozen=True)
class IdentityCheck:
    lhs: complex
    rhs: complex
    scale: float

    @property
    def passed(self) -> bool:
        return abs(self.lhs - self.rhs) <= 1e-9 * max(self.scale, 1.0)


def inclusion_exclusion_check(window: Window, ladder: Ladder, weights: Sequence[complex]) -> IdentityCheck:
    """``Σ_{n in S} a_n`` against ``Σ_𝒥 (-1)^{#𝒥} Σ_n a_n g_𝒥(n)``.

    ``g_𝒥`` is totally multiplicative and vanishes exactly on primes of the
    union of the rungs in ``𝒥``, so ``g_𝒥(n)`` is 1 unless ``n`` has such a
    prime factor.
    """

    a = np.asarray(weights, dtype=complex)
    if a.shape != (window.h,):
        raise ParameterError(f"need {window.h} weights, got {a.size}")
    primes_per_rung = rung_primes(ladder)
    lhs = complex(np.sum(a[in_S_window(window, ladder)]))

    rhs = 0j
    for size in range(ladder.J + 1):
        for subset in itertools.combinations(range(ladder.J), size):
            union = (
                np.unique(np.concatenate([primes_per_rung[j] for j in subset]))
                if subset
                else np.empty(0, dtype=np.int64)
            )
            g = prime_divisor_counts(window, union) == 0
            rhs += (-1) ** size * complex(np.sum(a[g]))
    return IdentityCheck(lhs=lhs, rhs=rhs, scale=float(np.sum(np.abs(a))))

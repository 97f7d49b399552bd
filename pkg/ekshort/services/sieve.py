"""Prime generation and exact ω(n) over windows via a segmented sieve."""
from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Dict, Iterator, Tuple

import numpy as np

from ekshort.models.window import OmegaSlice, PrimeTable, Window
from ekshort.utils.constants import MAX_PRIME_LIMIT, MAX_WINDOW_END, SEGMENT_LENGTH
from ekshort.utils.validators import ParameterError, require, require_range

logger = logging.getLogger(__name__)

# Trial division in the oracle stops at 2^21, the cube root of 2^63.
_ORACLE_TRIAL_LIMIT = 2**21
_MILLER_RABIN_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _segment_primes(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """Primes in ``(lo, hi]`` given every prime up to ``isqrt(hi)``."""

    flags = np.ones(hi - lo, dtype=bool)  # flags[i] <-> lo + 1 + i
    if lo < 1:
        flags[: 1 - lo] = False
    for p in primes[: int(np.searchsorted(primes, math.isqrt(hi), side="right"))]:
        p = int(p)
        start = max(p * p, (lo // p + 1) * p)
        if start > hi:
            continue
        flags[start - lo - 1 :: p] = False
    return (np.flatnonzero(flags) + (lo + 1)).astype(np.int64)


def base_primes(limit: int) -> PrimeTable:
    """All primes ``<= limit`` for ``2 <= limit <= 10^9``."""

    require_range("limit", limit, 2, MAX_PRIME_LIMIT)
    if limit <= SEGMENT_LENGTH:
        return PrimeTable(limit=limit, primes=_simple_sieve(limit))

    small = _simple_sieve(math.isqrt(limit))
    chunks = [small]
    lo = int(small[-1])
    while lo < limit:
        hi = min(lo + SEGMENT_LENGTH, limit)
        chunks.append(_segment_primes(lo, hi, small))
        lo = hi
    primes = np.concatenate(chunks)
    logger.debug("Sieved %d primes up to %d", primes.size, limit)
    return PrimeTable(limit=limit, primes=primes)


def primes_in_range(a: int, b: int, base: PrimeTable) -> np.ndarray:
    """Primes ``a < p <= b`` by segmented sieving over ``base``."""

    if a > b:
        raise ParameterError(f"empty range requires a <= b, got ({a}, {b}]")
    if a < 0:
        raise ParameterError("range start must be >= 0")
    if not base.sieves_up_to(b):
        raise ParameterError(f"base table up to {base.limit} cannot sieve up to {b}")
    if b <= base.limit:
        return base.between(a, b).copy()

    chunks = []
    lo = a
    while lo < b:
        hi = min(lo + SEGMENT_LENGTH, b)
        chunks.append(_segment_primes(lo, hi, base.primes))
        lo = hi
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)


def _check_base(window: Window, base: PrimeTable) -> None:
    if window.last > MAX_WINDOW_END:
        raise ParameterError("window end exceeds 2^63 - 1")
    if not base.sieves_up_to(window.last):
        raise ParameterError(
            f"base table up to {base.limit} is too small for window ending at {window.last}"
        )


def _omega_chunk(lo: int, m: int, primes: np.ndarray) -> np.ndarray:
    """ω of ``lo, lo + 1, ..., lo + m - 1``.

    Every base prime up to ``isqrt(lo + m - 1)`` is marked once and divided
    out completely; a leftover cofactor above one is a single large prime.
    """

    hi = lo + m - 1
    residual = np.arange(lo, lo + m, dtype=np.int64)
    omega = np.zeros(m, dtype=np.int8)
    usable = primes[: int(np.searchsorted(primes, math.isqrt(hi), side="right"))]
    split = int(np.searchsorted(usable, m, side="right"))

    for p in usable[:split]:
        p = int(p)
        start = (-lo) % p
        if start >= m:
            continue
        omega[start::p] += 1
        pk = p
        while pk <= hi:
            s = (-lo) % pk
            if s >= m:
                break
            residual[s::pk] //= p
            pk *= p

    # Primes above the chunk length hit at most one position each.
    large = usable[split:]
    if large.size:
        offsets = np.mod(-np.int64(lo), large)
        hit = offsets < m
        idx, ps = offsets[hit], large[hit]
        np.add.at(omega, idx, 1)
        while idx.size:
            np.floor_divide.at(residual, idx, ps)
            again = residual[idx] % ps == 0
            idx, ps = idx[again], ps[again]

    omega[residual > 1] += 1
    return omega


def _iter_chunks(window: Window, base: PrimeTable) -> Iterator[Tuple[int, np.ndarray]]:
    _check_base(window, base)
    lo = window.first
    while lo <= window.last:
        m = min(SEGMENT_LENGTH, window.last - lo + 1)
        yield lo, _omega_chunk(lo, m, base.primes)
        lo += m


def omega_window(w: Window, base: PrimeTable) -> OmegaSlice:
    """Exact ω over ``(x, x + h]``."""

    omegas = np.concatenate([chunk for _, chunk in _iter_chunks(w, base)])
    return OmegaSlice(window=w, omegas=omegas)


def omega_histogram(w: Window, base: PrimeTable) -> Dict[int, int]:
    """Histogram of ω over ``w`` without keeping the per-integer values."""

    totals = np.zeros(16, dtype=np.int64)
    for _, chunk in _iter_chunks(w, base):
        counts = np.bincount(chunk, minlength=totals.size)
        totals[: counts.size] += counts
    return {int(k): int(c) for k, c in enumerate(totals) if c}


@lru_cache(maxsize=1)
def _oracle_primes() -> np.ndarray:
    return _simple_sieve(_ORACLE_TRIAL_LIMIT)


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller–Rabin for ``n < 3.3 * 10^24``."""

    if n < 2:
        return False
    for p in _MILLER_RABIN_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MILLER_RABIN_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def omega_single(n: int) -> int:
    """ω(n) by trial division plus a primality test on the cofactor.

    Independent of the window sieve; used as its oracle.
    """

    if not 1 <= n <= MAX_WINDOW_END:
        raise ParameterError(f"n must be in [1, 2^63 - 1], got {n}")
    bound = min(_ORACLE_TRIAL_LIMIT, int(round(n ** (1.0 / 3.0))) + 2)
    primes = _oracle_primes()
    primes = primes[: int(np.searchsorted(primes, bound, side="right"))]
    divisors = primes[np.int64(n) % primes == 0]

    count = 0
    c = n
    for p in divisors:
        p = int(p)
        count += 1
        while c % p == 0:
            c //= p
    # c has no prime factor <= bound and c < bound^3: it is 1, p, p^2 or p*q.
    if c == 1:
        return count
    if is_probable_prime(c):
        return count + 1
    r = math.isqrt(c)
    return count + (1 if r * r == c else 2)


def prime_divisor_counts(w: Window, primes: np.ndarray) -> np.ndarray:
    """``#{p in primes : p | n}`` for every ``n`` in ``w``."""

    counts = np.zeros(w.h, dtype=np.int32)
    first = w.first
    primes = np.asarray(primes, dtype=np.int64)
    split = int(np.searchsorted(primes, w.h, side="right"))
    for p in primes[:split]:
        p = int(p)
        start = (-first) % p
        if start < w.h:
            counts[start::p] += 1
    large = primes[split:]
    if large.size:
        offsets = np.mod(-np.int64(first), large)
        np.add.at(counts, offsets[offsets < w.h], 1)
    return counts


def turan_kubilius_stat(slice_: OmegaSlice, X: int) -> float:
    """Mean absolute deviation ``(1/h) Σ |ω(n) - log log X|``."""

    if slice_.h == 0:
        raise ParameterError("empty slice")
    require(X > math.e, f"log log X needs X >= 3, got X = {X}")
    T = math.log(math.log(X))
    counts = slice_.counts()
    ks = np.arange(counts.size)
    return float(np.dot(counts, np.abs(ks - T)) / slice_.h)

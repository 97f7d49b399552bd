"""Process-wide caches shared by the services."""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Dict, Optional

from ekshort.models.window import PrimeTable, Window
from ekshort.services.prime_tables import load_prime_table
from ekshort.services.sieve import omega_histogram
from ekshort.settings import Settings
from ekshort.utils.constants import MAX_PRIME_LIMIT


@lru_cache(maxsize=1)
def prime_cache_dir() -> Optional[str]:
    """Return the directory where persisted prime tables live, if any."""

    return Settings.from_env().prime_cache


@lru_cache(maxsize=8)
def base_primes_cached(limit: int) -> PrimeTable:
    """Primes up to *limit*, shared immutably across callers and threads."""

    return load_prime_table(max(limit, 2), prime_cache_dir())


def sieving_table(last: int) -> PrimeTable:
    """A cached table large enough to sieve integers up to *last*."""

    need = math.isqrt(last) + 1
    # Round up to a power of two so nearby windows share one table.
    rounded = min(max(1 << (need - 1).bit_length(), 1024), MAX_PRIME_LIMIT)
    return base_primes_cached(max(rounded, need))


@lru_cache(maxsize=16)
def dyadic_histogram_cached(X: int) -> Dict[int, int]:
    """ω-histogram of the full block ``(X, 2X]``."""

    block = Window.dyadic(X)
    return omega_histogram(block, sieving_table(block.last))

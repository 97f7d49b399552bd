"""Service layer responsible for caching prime tables on disk."""
from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Callable, Optional

from ekshort.models.window import PrimeTable
from ekshort.repositories.prime_table_repo import read_prime_table, write_prime_table
from ekshort.services.sieve import base_primes
from ekshort.utils.constants import PRIME_CACHE_FORMAT

logger = logging.getLogger(__name__)


def ensure_cache(path: str | os.PathLike[str], builder: Callable[[], PrimeTable]) -> None:
    """Ensure the prime-table cache file exists on disk."""

    cache_path = Path(path)
    if cache_path.exists():
        return

    logger.info("Building prime cache %s", cache_path)
    write_prime_table(cache_path, builder())


def load_prime_table(limit: int, cache_dir: Optional[str | os.PathLike[str]] = None) -> PrimeTable:
    """Primes up to *limit*, read from ``cache_dir`` when one is configured."""

    if not cache_dir:
        return base_primes(limit)

    path = Path(cache_dir) / PRIME_CACHE_FORMAT.file_name(limit)
    ensure_cache(path, lambda: base_primes(limit))
    if not path.exists():
        raise FileNotFoundError(f"Could not create prime cache {path}.")

    table = read_prime_table(path)
    if table.limit != limit:
        raise RuntimeError(f"Prime cache {path} holds limit {table.limit}, expected {limit}.")
    return table

"""Warm the on-disk prime cache named by ``EK_PRIME_CACHE``.

Usage: ``python scripts/refresh_prime_cache.py [LIMIT ...]`` (defaults to
the tables the experiments use most often).
"""
from __future__ import annotations

import logging
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parents[1]))

from ekshort.services.prime_tables import load_prime_table
from ekshort.settings import LOG_FORMAT, Settings
from ekshort.utils.constants import DEFAULT_PRIME_CUTOFF
from ekshort.utils.validators import parse_magnitude

DEFAULT_LIMITS = (DEFAULT_PRIME_CUTOFF, 2**17, 2**19)


def main(argv: list[str]) -> int:
    settings = Settings.from_env()
    logging.basicConfig(level=settings.log_level, format=LOG_FORMAT)
    if not settings.prime_cache:
        logging.error("EK_PRIME_CACHE is not set; nothing to refresh.")
        return 2
    limits = [parse_magnitude(a) for a in argv] or list(DEFAULT_LIMITS)
    for limit in limits:
        table = load_prime_table(limit, settings.prime_cache)
        logging.info("Prime table up to %d: %d primes", table.limit, len(table))
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))

"""Binary persistence for prime tables.

Layout: little-endian uint64 ``limit``, uint64 ``count``, then ``count``
uint16 gaps between consecutive primes (the first gap measured from 0).
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from ekshort.models.window import PrimeTable
from ekshort.utils.constants import PRIME_CACHE_FORMAT

_HEADER_BYTES = 16


def write_prime_table(path: str | os.PathLike[str], table: PrimeTable) -> None:
    fmt = PRIME_CACHE_FORMAT
    gaps = np.diff(table.primes, prepend=0)
    if gaps.size and gaps.max() > np.iinfo(np.uint16).max:
        raise ValueError("prime gap does not fit the 16-bit cache format")
    header = np.array([table.limit, table.primes.size], dtype=fmt.header_dtype)
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_suffix(target.suffix + ".tmp")
    with tmp.open("wb") as fh:
        fh.write(header.tobytes())
        fh.write(gaps.astype(fmt.delta_dtype).tobytes())
    tmp.replace(target)


def read_prime_table(path: str | os.PathLike[str]) -> PrimeTable:
    fmt = PRIME_CACHE_FORMAT
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER_BYTES:
        raise RuntimeError(f"Prime cache {path} is truncated.")
    limit, count = (int(v) for v in np.frombuffer(raw[:_HEADER_BYTES], dtype=fmt.header_dtype))
    body = raw[_HEADER_BYTES:]
    if len(body) != 2 * count:
        raise RuntimeError(f"Prime cache {path} holds {len(body) // 2} gaps, header says {count}.")
    primes = np.cumsum(np.frombuffer(body, dtype=fmt.delta_dtype).astype(np.int64))
    if primes.size and primes[-1] > limit:
        raise RuntimeError(f"Prime cache {path} is inconsistent with its limit {limit}.")
    return PrimeTable(limit=limit, primes=primes)

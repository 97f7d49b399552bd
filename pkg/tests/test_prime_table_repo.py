from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from ekshort.repositories.prime_table_repo import read_prime_table, write_prime_table
from ekshort.services import prime_tables
from ekshort.services.sieve import base_primes
from ekshort.utils import cache
from ekshort.utils.constants import PRIME_CACHE_FORMAT


def test_header_layout_is_little_endian(tmp_path):
    path = tmp_path / "p.primes"
    write_prime_table(path, base_primes(30))
    raw = path.read_bytes()
    assert np.frombuffer(raw[:16], dtype="<u8").tolist() == [30, 10]
    assert np.frombuffer(raw[16:], dtype="<u2").tolist() == [2, 1, 2, 2, 4, 2, 4, 2, 4, 6]


def test_read_back_preserves_limit_and_primes(tmp_path):
    path = tmp_path / "p.primes"
    table = base_primes(10**5)
    write_prime_table(path, table)
    loaded = read_prime_table(path)
    assert loaded.limit == table.limit
    assert np.array_equal(loaded.primes, table.primes)


def test_truncated_file_raises(tmp_path):
    path = tmp_path / "bad.primes"
    path.write_bytes(b"\x00" * 10)
    with pytest.raises(RuntimeError):
        read_prime_table(path)


def test_count_mismatch_raises(tmp_path):
    path = tmp_path / "bad.primes"
    write_prime_table(path, base_primes(100))
    path.write_bytes(path.read_bytes()[:-2])
    with pytest.raises(RuntimeError):
        read_prime_table(path)


def test_limit_inconsistency_raises(tmp_path):
    path = tmp_path / "bad.primes"
    header = np.array([10, 5], dtype="<u8").tobytes()
    path.write_bytes(header + np.array([2, 1, 2, 2, 4], dtype="<u2").tobytes())
    with pytest.raises(RuntimeError):
        read_prime_table(path)


def test_load_prime_table_builds_cache_once(tmp_path, monkeypatch):
    calls = []
    original = prime_tables.base_primes

    def counting(limit):
        calls.append(limit)
        return original(limit)

    monkeypatch.setattr(prime_tables, "base_primes", counting)
    first = prime_tables.load_prime_table(1000, tmp_path)
    second = prime_tables.load_prime_table(1000, tmp_path)
    assert calls == [1000]
    assert (tmp_path / PRIME_CACHE_FORMAT.file_name(1000)).exists()
    assert np.array_equal(first.primes, second.primes)


def test_load_prime_table_without_cache_dir(monkeypatch):
    table = prime_tables.load_prime_table(50)
    assert table.primes.tolist()[-1] == 47


def test_cache_dir_comes_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("EK_PRIME_CACHE", str(tmp_path))
    cache.prime_cache_dir.cache_clear()
    assert cache.prime_cache_dir() == str(tmp_path)

from __future__ import annotations

import os
import sys
from pathlib import Path

import hypothesis
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

hypothesis.settings.register_profile("fast", max_examples=25, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))

from ekshort.utils import cache  # noqa: E402


@pytest.fixture(autouse=True)
def _no_prime_cache(monkeypatch):
    """Tests build prime tables in memory unless they opt into a cache dir."""

    monkeypatch.delenv("EK_PRIME_CACHE", raising=False)
    cache.prime_cache_dir.cache_clear()
    yield
    cache.prime_cache_dir.cache_clear()


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs at X up to 1e9; deselect with -m 'not slow'")

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from ekshort import settings
from ekshort.settings import Settings, load_run_config


@pytest.fixture(autouse=True)
def _no_dotenv(monkeypatch):
    monkeypatch.setattr(settings, "load_dotenv", lambda *a, **k: False)
    for name in ("EK_PRIME_CACHE", "EK_THREADS", "EK_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def test_defaults(monkeypatch):
    monkeypatch.setattr(settings.os, "cpu_count", lambda: 6)
    s = Settings.from_env()
    assert s == Settings(prime_cache=None, threads=6, log_level="INFO")


def test_reads_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("EK_PRIME_CACHE", str(tmp_path))
    monkeypatch.setenv("EK_THREADS", "3")
    monkeypatch.setenv("EK_LOG_LEVEL", "debug")
    s = Settings.from_env()
    assert (s.prime_cache, s.threads, s.log_level) == (str(tmp_path), 3, "DEBUG")


@pytest.mark.parametrize("raw", ["abc", "0", "-2", ""])
def test_malformed_threads_fall_back(monkeypatch, raw):
    monkeypatch.setattr(settings.os, "cpu_count", lambda: 4)
    monkeypatch.setenv("EK_THREADS", raw)
    assert Settings.from_env().threads == 4


def test_unknown_log_level_falls_back(monkeypatch):
    monkeypatch.setenv("EK_LOG_LEVEL", "chatty")
    assert Settings.from_env().log_level == "INFO"


def test_flat_config_file(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("X=1e6\nprime-cutoff=100000\n# comment\n", encoding="utf-8")
    assert load_run_config(path) == {"X": "1e6", "prime_cutoff": "100000"}


def test_yaml_config_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("X: 1000000\nt: [0.3, 0.7]\nesseen: true\n", encoding="utf-8")
    assert load_run_config(path) == {"X": 1000000, "t": [0.3, 0.7], "esseen": True}


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_run_config(tmp_path / "nope.env")

"""Runtime settings read from the environment and from run config files."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import dotenv_values, load_dotenv
from yaml.loader import SafeLoader

TOOL_NAME = "ekshort"
TOOL_VERSION = "0.3.0"
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"


@dataclass
class Settings:
    prime_cache: Optional[str]
    threads: int
    log_level: str

    @classmethod
    def from_env(cls) -> "Settings":
        """Load settings from ``.env`` files and environment variables."""

        load_dotenv()
        default_threads = os.cpu_count() or 1
        threads_raw = os.getenv("EK_THREADS", str(default_threads))
        threads = int(threads_raw) if str(threads_raw).isdigit() and int(threads_raw) > 0 else default_threads
        level = os.getenv("EK_LOG_LEVEL", "INFO").upper()
        if not isinstance(logging.getLevelName(level), int):
            level = "INFO"
        return cls(
            prime_cache=os.getenv("EK_PRIME_CACHE") or None,
            threads=threads,
            log_level=level,
        )


def load_run_config(path: str | os.PathLike[str]) -> Dict[str, Any]:
    """Load a ``--config`` file: flat ``key=value`` lines, or YAML for ``.yaml``/``.yml``."""

    cfg_path = Path(path)
    if not cfg_path.exists():
        raise FileNotFoundError(f"Config file {cfg_path} not found.")

    if cfg_path.suffix.lower() in (".yaml", ".yml"):
        with cfg_path.open("r", encoding="utf-8") as f:
            loaded = yaml.load(f, Loader=SafeLoader) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"Config file {cfg_path} must hold a flat mapping.")
        return {str(k).replace("-", "_"): v for k, v in loaded.items()}

    return {k.replace("-", "_"): v for k, v in dotenv_values(cfg_path).items() if v is not None}

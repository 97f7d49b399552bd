"""Experiment configuration, per-window results and run manifests."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ekshort.utils.constants import CSV_COLUMNS, THETA_MAPS, ThetaMap
from ekshort.utils.validators import ParameterError, require_range

SEED_LIMIT = 2**64


@dataclass(frozen=True)
class ExperimentConfig:
    X: int
    h: int
    samples: int = 1
    seed: int = 0
    threads: int = 1
    # Dyadic references: None means full enumeration, otherwise a sample count.
    sampled: Optional[int] = None
    threshold: float = 0.1
    alpha: float = 1.0
    k: Optional[int] = None
    A: float = 10.0
    B: float = 10.0
    delta: float = 0.1
    theta_map: str = ThetaMap.NORMALISED
    esseen: bool = False

    def __post_init__(self) -> None:
        if self.X < 20:
            raise ParameterError(f"X must be >= 20, got {self.X}")
        if self.h > self.X:
            raise ParameterError(f"h must be <= X, got h={self.h} > X={self.X}")
        if self.h < 2:
            raise ParameterError(f"h must be >= 2, got {self.h}")
        if self.samples < 1:
            raise ParameterError(f"samples must be >= 1, got {self.samples}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if self.threads < 1:
            raise ParameterError("threads must be >= 1")
        if self.theta_map not in THETA_MAPS:
            raise ParameterError(f"unknown theta map {self.theta_map!r}; choose from {THETA_MAPS}")
        require_range("threshold", self.threshold, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class WindowResult:
    """Scalars computed for the window with the given index."""

    index: int
    x: int
    values: Dict[str, float] = field(default_factory=dict)

    def row(self) -> Dict[str, Any]:
        return {"index": self.index, "x": self.x, **self.values}


@dataclass
class RunManifest:
    """Everything needed to reproduce one command-line run."""

    tool_version: str
    csv_schema: str
    subcommand: str
    config: Dict[str, Any]
    seed: Optional[int]
    grids: Dict[str, Any] = field(default_factory=dict)
    prime_cutoffs: Dict[str, int] = field(default_factory=dict)
    started_at: str = ""
    finished_at: str = ""
    summary: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ExperimentOutcome:
    """Rows destined for the CSV plus the summary and grids for the manifest."""

    subcommand: str
    rows: List[Dict[str, Any]]
    summary: Dict[str, Any] = field(default_factory=dict)
    grids: Dict[str, Any] = field(default_factory=dict)
    prime_cutoffs: Dict[str, int] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        columns = list(CSV_COLUMNS[self.subcommand])
        frame = pd.DataFrame(self.rows)
        for column in columns:
            if column not in frame.columns:
                frame[column] = np.nan
        return frame[columns]

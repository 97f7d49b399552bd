"""Utilities that turn experiment outcomes into CSV and manifest files."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ekshort.models.experiment import ExperimentOutcome, RunManifest
from ekshort.utils.constants import CSV_FLOAT_FORMAT


@dataclass
class CsvPayload:
    subcommand: str
    file_name: str
    content: bytes


def _normalise_booleans(df: pd.DataFrame) -> pd.DataFrame:
    df = df.copy()
    for column in df.columns:
        if df[column].dtype == bool:
            df[column] = df[column].map({True: "true", False: "false"})
    return df


def frame_to_csv(df: pd.DataFrame) -> str:
    """Header row, 17 significant digits, ``\\n`` line endings."""

    return _normalise_booleans(df).to_csv(
        index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n", na_rep="nan"
    )


def build_csv_payload(outcome: ExperimentOutcome, stem: str) -> CsvPayload:
    csv_str = frame_to_csv(outcome.to_frame())
    return CsvPayload(
        subcommand=outcome.subcommand,
        file_name=f"{stem}.csv",
        content=csv_str.encode("utf-8"),
    )


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def manifest_to_json(manifest: RunManifest) -> str:
    """Flat object in field order; non-finite floats are written as JSON ``NaN``/``Infinity``."""

    return json.dumps(manifest.to_dict(), indent=2, default=_json_default) + "\n"


def _write_atomic(path: Path, content: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(content)
    os.replace(tmp, path)


def write_csv(payload: CsvPayload, directory: Path) -> Path:
    target = Path(directory) / payload.file_name
    _write_atomic(target, payload.content)
    return target


def write_manifest(manifest: RunManifest, path: Path) -> Path:
    target = Path(path)
    _write_atomic(target, manifest_to_json(manifest).encode("utf-8"))
    return target

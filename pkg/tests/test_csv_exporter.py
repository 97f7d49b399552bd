from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from ekshort.exporters.csv_exporter import (
    build_csv_payload,
    frame_to_csv,
    manifest_to_json,
    write_csv,
    write_manifest,
)
from ekshort.models.experiment import ExperimentOutcome, RunManifest


def _manifest(**summary) -> RunManifest:
    return RunManifest(
        tool_version="0.3.0",
        csv_schema="1",
        subcommand="sd-check",
        config={"X": 10**5},
        seed=11,
        summary=summary,
    )


def test_booleans_are_lowercase():
    outcome = ExperimentOutcome(
        subcommand="selftest",
        rows=[
            {"check": "a", "passed": True, "detail": "ok"},
            {"check": "b", "passed": False, "detail": "bad"},
        ],
    )
    assert frame_to_csv(outcome.to_frame()) == "check,passed,detail\na,true,ok\nb,false,bad\n"


def test_schema_columns_only_and_missing_filled():
    outcome = ExperimentOutcome(
        subcommand="theorem2",
        rows=[{"index": 0, "x": 5, "count": 2.0, "prediction": 4.0, "ratio_dyadic": 1.0}],
    )
    text = frame_to_csv(outcome.to_frame())
    header, row = text.splitlines()
    assert header == "index,x,count,prediction,ratio"
    assert row == "0,5,2,4,nan"


def test_floats_keep_seventeen_digits():
    outcome = ExperimentOutcome(
        subcommand="rvh",
        rows=[{"u": 0.1, "re_R": 1 / 3, "im_R": -0.0, "abs_R": math.pi, "trivial_bound": 2.0}],
    )
    row = frame_to_csv(outcome.to_frame()).splitlines()[1].split(",")
    assert [float(v) for v in row] == [0.1, 1 / 3, -0.0, math.pi, 2.0]
    assert row[0] == "0.10000000000000001"


def test_payload_and_write(tmp_path):
    outcome = ExperimentOutcome(subcommand="selftest", rows=[{"check": "a", "passed": True, "detail": ""}])
    payload = build_csv_payload(outcome, "run1")
    assert payload.file_name == "run1.csv"
    assert payload.subcommand == "selftest"
    target = write_csv(payload, tmp_path / "nested")
    assert target.read_bytes() == payload.content
    assert sorted(p.name for p in target.parent.iterdir()) == ["run1.csv"]


def test_manifest_json_handles_numpy_and_complex(tmp_path):
    manifest = _manifest(n=np.int64(3), arr=np.array([1.0, 2.0]), z=1 + 2j, where=Path("a/b"), bad=float("nan"))
    text = manifest_to_json(manifest)
    assert text.endswith("\n")
    loaded = json.loads(text)
    assert list(loaded)[:5] == ["tool_version", "csv_schema", "subcommand", "config", "seed"]
    assert loaded["summary"]["n"] == 3
    assert loaded["summary"]["arr"] == [1.0, 2.0]
    assert loaded["summary"]["z"] == [1.0, 2.0]
    assert loaded["summary"]["where"] == str(Path("a/b"))
    assert math.isnan(loaded["summary"]["bad"])

    path = write_manifest(manifest, tmp_path / "run1.json")
    assert path.read_text(encoding="utf-8") == text
    assert not path.with_name("run1.json.tmp").exists()


def test_manifest_rejects_unknown_objects():
    with pytest.raises(TypeError):
        manifest_to_json(_manifest(obj=object()))

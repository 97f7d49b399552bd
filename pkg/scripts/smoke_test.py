"""Run the invariant suite and print one line per check."""
from __future__ import annotations

import logging
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parents[1]))

from ekshort.services.selftest import run_selftest
from ekshort.settings import LOG_FORMAT


def main() -> int:
    logging.basicConfig(level=logging.WARNING, format=LOG_FORMAT)
    outcome = run_selftest()
    for row in outcome.rows:
        print(f"{'ok  ' if row['passed'] else 'FAIL'} {row['check']}: {row['detail']}")
    return 0 if outcome.summary["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())

"""``python -m ekshort`` delegates to :func:`ekshort.cli.main`."""
from __future__ import annotations

import sys

from ekshort.cli import main

if __name__ == "__main__":  # pragma: no cover - command-line entrypoint
    sys.exit(main())

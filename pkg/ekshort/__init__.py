"""Desk-scale verification toolkit for the Erdős–Kac law in short intervals."""
from ekshort.settings import TOOL_VERSION as __version__

__all__ = ["__version__"]

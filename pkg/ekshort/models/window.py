"""Integer windows, ω-slices and prime tables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Literal, Union

import numpy as np

from ekshort.utils.constants import MAX_WINDOW_END
from ekshort.utils.validators import ParameterError


@dataclass(frozen=True)
class Window:
    """The half-open integer interval ``(x, x + h]``."""

    x: int
    h: int

    def __post_init__(self) -> None:
        if self.x < 0:
            raise ParameterError(f"window start must be >= 0, got {self.x}")
        if self.h < 1:
            raise ParameterError(f"window length must be >= 1, got {self.h}")
        if self.x + self.h > MAX_WINDOW_END:
            raise ParameterError("window end exceeds 2^63 - 1")

    @property
    def first(self) -> int:
        return self.x + 1

    @property
    def last(self) -> int:
        return self.x + self.h

    @classmethod
    def dyadic(cls, X: int) -> "Window":
        """The block ``(X, 2X]``."""

        return cls(x=X, h=X)

    def integers(self) -> np.ndarray:
        return np.arange(self.first, self.last + 1, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes up to ``limit``; immutable once built."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return int(self.primes.size)

    def up_to(self, bound: int) -> np.ndarray:
        """Primes ``p <= bound`` (a view)."""

        return self.primes[: int(np.searchsorted(self.primes, bound, side="right"))]

    def between(self, low: int, high: int) -> np.ndarray:
        """Primes ``low < p <= high`` (a view)."""

        start = int(np.searchsorted(self.primes, low, side="right"))
        stop = int(np.searchsorted(self.primes, high, side="right"))
        return self.primes[start:stop]

    def sieves_up_to(self, n: int) -> bool:
        """True when every composite ``<= n`` has a prime factor in the table."""

        return self.limit >= math.isqrt(n)


def _histogram_from(omegas: np.ndarray) -> Dict[int, int]:
    counts = np.bincount(omegas, minlength=1) if omegas.size else np.zeros(1, dtype=np.int64)
    return {int(k): int(c) for k, c in enumerate(counts) if c}


@dataclass(frozen=True, eq=False)
class OmegaSlice:
    """ω-values of a window and their histogram.

    ``omegas[i] = ω(x + 1 + i)``; the histogram maps ``k`` to
    ``#{n in window : ω(n) = k}``.
    """

    window: Window
    omegas: np.ndarray = field(repr=False)
    histogram: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.omegas.shape != (self.window.h,):
            raise ParameterError("omegas must have one entry per integer of the window")
        self.omegas.setflags(write=False)
        if not self.histogram:
            object.__setattr__(self, "histogram", _histogram_from(self.omegas))

    @property
    def h(self) -> int:
        return self.window.h

    def counts(self, size: int | None = None) -> np.ndarray:
        """Dense histogram ``counts[k]`` for ``k = 0..size-1``."""

        top = max(self.histogram) + 1 if self.histogram else 1
        out = np.zeros(max(size or 0, top), dtype=np.int64)
        for k, c in self.histogram.items():
            out[k] = c
        return out


@dataclass(frozen=True)
class DyadicStats:
    """Statistics of ω over the block ``(X, 2X]``, exact or sampled."""

    X: int
    T: float
    histogram: Dict[int, int]
    count: int
    mode: str

    def counts(self) -> np.ndarray:
        out = np.zeros(max(self.histogram) + 1 if self.histogram else 1, dtype=np.int64)
        for k, c in self.histogram.items():
            out[k] = c
        return out


@dataclass(frozen=True)
class Sampling:
    """Uniform-with-replacement sampling of ``count`` integers, seeded."""

    count: int
    seed: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ParameterError(f"sample count must be >= 1, got {self.count}")
        if self.seed < 0:
            raise ParameterError("seed must be non-negative")


FULL: Literal["full"] = "full"
Mode = Union[Literal["full"], Sampling]

"""Distribution functions and characteristic-function curves."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Protocol, Sequence

import numpy as np

from ekshort.models.params import TheoryParams
from ekshort.models.window import Window
from ekshort.utils.constants import Provenance
from ekshort.utils.validators import ParameterError

ArrayFn = Callable[[np.ndarray], np.ndarray]


class CdfLike(Protocol):
    """Anything exposing jump points and both one-sided values.

    Both theoretical and empirical distribution functions satisfy it, which
    keeps the sup-norm comparison symmetric in its arguments.
    """

    jumps: np.ndarray

    def value(self, y: np.ndarray) -> np.ndarray:  # pragma: no cover - signature documentation only
        ...

    def left_value(self, y: np.ndarray) -> np.ndarray:  # pragma: no cover - signature documentation only
        ...


@dataclass(frozen=True, eq=False)
class DistributionFn:
    """A distribution function given by closures.

    ``value`` is right-continuous, ``left_value`` returns left limits and
    ``density`` (when known) is the derivative of the smooth part between
    jumps. ``derivative_bound`` bounds ``|density|`` on the real line.
    """

    value: ArrayFn
    left_value: ArrayFn
    jumps: np.ndarray = field(default_factory=lambda: np.empty(0))
    density: Optional[ArrayFn] = None
    derivative_bound: float = float("inf")
    name: str = ""

    def __post_init__(self) -> None:
        jumps = np.asarray(self.jumps, dtype=float)
        if jumps.size > 1 and not np.all(np.diff(jumps) > 0):
            raise ParameterError("jump locations must be strictly increasing")
        object.__setattr__(self, "jumps", jumps)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Right-continuous step function with total mass one.

    ``cumulative[i]`` is the value on ``[jumps[i], jumps[i + 1])``.
    """

    jumps: np.ndarray
    cumulative: np.ndarray
    window: Optional[Window] = None
    params: Optional[TheoryParams] = None

    def __post_init__(self) -> None:
        if self.jumps.shape != self.cumulative.shape:
            raise ParameterError("jumps and cumulative values must align")
        if self.jumps.size > 1 and not np.all(np.diff(self.jumps) > 0):
            raise ParameterError("jump locations must be strictly increasing")
        if self.cumulative.size and not np.all(np.diff(self.cumulative) >= 0):
            raise ParameterError("cumulative values must be nondecreasing")

    @classmethod
    def from_histogram(
        cls,
        histogram: Mapping[int, int],
        params: TheoryParams,
        window: Optional[Window] = None,
    ) -> "EmpiricalCdf":
        """Step function of ``(ω - T) / sqrt(T)`` for the given ω-histogram."""

        ks = np.array(sorted(k for k, c in histogram.items() if c), dtype=np.int64)
        if ks.size == 0:
            raise ParameterError("empty histogram")
        counts = np.array([histogram[int(k)] for k in ks], dtype=np.int64)
        jumps = (ks - params.T) / params.sqrt_T
        cumulative = np.cumsum(counts) / counts.sum()
        return cls(jumps=jumps, cumulative=cumulative, window=window, params=params)

    @classmethod
    def from_points(cls, locations: Sequence[float], masses: Sequence[float]) -> "EmpiricalCdf":
        """Step function with atoms ``masses`` at ``locations`` (normalised)."""

        loc = np.asarray(locations, dtype=float)
        mass = np.asarray(masses, dtype=float)
        if loc.shape != mass.shape or loc.size == 0:
            raise ParameterError("locations and masses must be non-empty and aligned")
        if np.any(mass < 0) or mass.sum() <= 0:
            raise ParameterError("masses must be non-negative with positive total")
        order = np.argsort(loc, kind="stable")
        loc, mass = loc[order], mass[order]
        unique, inverse = np.unique(loc, return_inverse=True)
        merged = np.zeros(unique.size)
        np.add.at(merged, inverse, mass)
        return cls(jumps=unique, cumulative=np.cumsum(merged) / merged.sum())

    def value(self, y: np.ndarray | float) -> np.ndarray:
        idx = np.searchsorted(self.jumps, np.asarray(y, dtype=float), side="right")
        return np.where(idx > 0, self.cumulative[np.maximum(idx - 1, 0)], 0.0)

    def left_value(self, y: np.ndarray | float) -> np.ndarray:
        idx = np.searchsorted(self.jumps, np.asarray(y, dtype=float), side="left")
        return np.where(idx > 0, self.cumulative[np.maximum(idx - 1, 0)], 0.0)

    def masses(self) -> np.ndarray:
        return np.diff(self.cumulative, prepend=0.0)

    def as_distribution(self) -> DistributionFn:
        return DistributionFn(
            value=self.value,
            left_value=self.left_value,
            jumps=self.jumps,
            density=lambda y: np.zeros_like(np.asarray(y, dtype=float)),
            derivative_bound=0.0,
            name="empirical",
        )


@dataclass(frozen=True, eq=False)
class CharCurve:
    """Complex values of a characteristic function on a strictly increasing τ-grid."""

    taus: np.ndarray
    values: np.ndarray
    provenance: str = Provenance.THEORY

    def __post_init__(self) -> None:
        taus = np.asarray(self.taus, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if taus.shape != values.shape or taus.ndim != 1:
            raise ParameterError("τ-grid and values must be one-dimensional and aligned")
        if taus.size > 1 and not np.all(np.diff(taus) > 0):
            raise ParameterError("τ-grid must be strictly increasing")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "values", values)

    def same_grid(self, other: "CharCurve") -> bool:
        return self.taus.shape == other.taus.shape and bool(np.array_equal(self.taus, other.taus))


def sup_distance(F: CdfLike, G: CdfLike, grid: np.ndarray) -> float:
    """``sup |F - G|`` over both functions' jumps (both sides) and *grid*."""

    points = np.concatenate([np.asarray(F.jumps, dtype=float), np.asarray(G.jumps, dtype=float), grid])
    right = np.abs(F.value(points) - G.value(points))
    left = np.abs(F.left_value(points) - G.left_value(points))
    return float(max(right.max(initial=0.0), left.max(initial=0.0)))

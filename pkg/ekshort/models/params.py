"""Parameter records shared by the theory and pretentious services."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from ekshort.utils.validators import ParameterError, log_of


@dataclass(frozen=True)
class TheoryParams:
    """``X`` together with ``T = log log X`` in double precision."""

    X: int
    T: float

    @classmethod
    def for_X(cls, X: int) -> "TheoryParams":
        if X < 20:
            raise ParameterError(f"X must be >= 20, got {X}")
        return cls(X=X, T=math.log(log_of(X)))

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise ParameterError("T = log log X must be positive")

    @property
    def sqrt_T(self) -> float:
        return math.sqrt(self.T)

    @property
    def log_X(self) -> float:
        return log_of(self.X)


@dataclass(frozen=True)
class TwistSpec:
    """``f(p) = e^{iθ}`` compared against ``n^{iα}``, optionally on ``(a, b]``."""

    theta: float
    alpha: float = 0.0
    restriction: Optional[Tuple[float, float]] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and math.isfinite(self.alpha)):
            raise ParameterError("theta and alpha must be finite")
        if self.restriction is not None:
            low, high = self.restriction
            if not low <= high:
                raise ParameterError(f"restriction ({low}, {high}] is reversed")


@dataclass(frozen=True)
class PrimePhase:
    """The unimodular prime values ``p -> e^{iθ} p^{iα}``."""

    theta: float = 0.0
    alpha: float = 0.0

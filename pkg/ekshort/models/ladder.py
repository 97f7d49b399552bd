"""The factor-interval system ``{[P_j, Q_j]}``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

from ekshort.utils.validators import ParameterError


@dataclass(frozen=True)
class Ladder:
    """Intervals ``[P_j, Q_j]`` stored through their logarithms."""

    X: int
    eta: float
    logP: Tuple[float, ...]
    logQ: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.logP) != len(self.logQ):
            raise ParameterError("logP and logQ must have one entry per rung")

    @property
    def J(self) -> int:
        return len(self.logP)

    def intervals(self) -> List[Tuple[float, float]]:
        """``(P_j, Q_j)`` as floats; only meaningful while ``Q_j`` fits a double."""

        return [(math.exp(lp), math.exp(lq)) for lp, lq in zip(self.logP, self.logQ)]

    def prime_bounds(self) -> List[Tuple[int, int]]:
        """Integer bounds so that ``lo <= p <= hi`` matches ``P_j <= p <= Q_j``."""

        out: List[Tuple[int, int]] = []
        for lp, lq in zip(self.logP, self.logQ):
            out.append((math.ceil(math.exp(lp) - 1e-9), math.floor(math.exp(lq) + 1e-9)))
        return out

    def max_prime(self) -> int:
        return max((hi for _, hi in self.prime_bounds()), default=1)

    def to_record(self) -> str:
        """Flat text record: ``eta``, ``J``, then ``logP logQ`` per rung."""

        lines = [f"X={self.X}", f"eta={self.eta!r}", f"J={self.J}"]
        lines.extend(f"{lp!r} {lq!r}" for lp, lq in zip(self.logP, self.logQ))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_record(cls, text: str) -> "Ladder":
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        try:
            header = dict(line.split("=", 1) for line in lines[:3])
            X, eta, J = int(header["X"]), float(header["eta"]), int(header["J"])
            rungs = [tuple(float(v) for v in line.split()) for line in lines[3:]]
        except (KeyError, ValueError) as exc:
            raise ParameterError("malformed ladder record") from exc
        if len(rungs) != J or any(len(r) != 2 for r in rungs):
            raise ParameterError("ladder record rung count does not match J")
        return cls(X=X, eta=eta, logP=tuple(r[0] for r in rungs), logQ=tuple(r[1] for r in rungs))

"""Empirical distribution and characteristic functions built from ω-histograms."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np
from scipy.integrate import trapezoid

from ekshort.models.distribution import CharCurve, DistributionFn, EmpiricalCdf, sup_distance
from ekshort.models.params import TheoryParams
from ekshort.models.window import FULL, DyadicStats, Mode, OmegaSlice, Sampling, Window
from ekshort.services import theory
from ekshort.services.sieve import omega_single
from ekshort.utils import cache, rng
from ekshort.utils.constants import (
    CAUCHY_POINTS,
    FULL_ENUMERATION_LIMIT,
    PROP1_POINTS_PER_DECADE,
    Provenance,
)
from ekshort.utils.validators import ParameterError, require

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Distribution functions
# ---------------------------------------------------------------------------


def empirical_cdf(slice_: OmegaSlice, p: TheoryParams) -> EmpiricalCdf:
    """``F(y) = #{n : ω(n) <= T + y sqrt T} / h``."""

    if slice_.h == 0:
        raise ParameterError("empty slice")
    return EmpiricalCdf.from_histogram(slice_.histogram, p, window=slice_.window)


def sup_discrepancy(F: EmpiricalCdf | DistributionFn, G: EmpiricalCdf | DistributionFn) -> float:
    """Sup-norm distance over both jump sets and the uniform grid."""

    return sup_distance(F, G, theory.sup_grid())


# ---------------------------------------------------------------------------
# Characteristic functions
# ---------------------------------------------------------------------------


def _dense(histogram: Mapping[int, int]) -> np.ndarray:
    top = max(histogram) + 1 if histogram else 1
    counts = np.zeros(top, dtype=float)
    for k, c in histogram.items():
        counts[k] = c
    return counts


def charfn_from_histogram(histogram: Mapping[int, int], p: TheoryParams, taus) -> np.ndarray:
    """``Σ_k c_k e^{iτ(k - T)/sqrt T} / Σ_k c_k`` for every τ."""

    counts = _dense(histogram)
    ks = (np.arange(counts.size) - p.T) / p.sqrt_T
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    return np.exp(1j * np.outer(taus, ks)) @ counts / counts.sum()


def phase_means(histogram: Mapping[int, int], thetas) -> np.ndarray:
    """Raw means ``Σ_k c_k e^{iθk} / Σ_k c_k``, without centring or scaling."""

    counts = _dense(histogram)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    return np.exp(1j * np.outer(thetas, np.arange(counts.size))) @ counts / counts.sum()


def empirical_charfn(slice_: OmegaSlice, p: TheoryParams, taus) -> CharCurve:
    if slice_.h == 0:
        raise ParameterError("empty slice")
    values = charfn_from_histogram(slice_.histogram, p, taus)
    return CharCurve(taus=np.asarray(taus, dtype=float), values=values, provenance=Provenance.WINDOW)


def charfn_per_integer(slice_: OmegaSlice, p: TheoryParams, taus) -> np.ndarray:
    """Same values as :func:`empirical_charfn`, summed integer by integer."""

    z = (slice_.omegas.astype(float) - p.T) / p.sqrt_T
    return np.array([np.mean(np.exp(1j * tau * z)) for tau in np.atleast_1d(taus)])


# ---------------------------------------------------------------------------
# Dyadic block
# ---------------------------------------------------------------------------


def _sample_omegas(X: int, sampling: Sampling) -> np.ndarray:
    ns = rng.uniform_integers(sampling.seed, rng.DYADIC_SAMPLE_STREAM, X + 1, 2 * X, sampling.count)
    return np.fromiter((omega_single(int(n)) for n in ns), dtype=np.int64, count=ns.size)


def dyadic_stats(X: int, mode: Mode = FULL) -> DyadicStats:
    """ω statistics over ``(X, 2X]``, fully enumerated or sampled."""

    p = TheoryParams.for_X(X)
    if mode == FULL:
        if X > FULL_ENUMERATION_LIMIT:
            raise ParameterError(f"full enumeration is limited to X <= {FULL_ENUMERATION_LIMIT}; use sampling")
        histogram = cache.dyadic_histogram_cached(X)
        return DyadicStats(X=X, T=p.T, histogram=dict(histogram), count=X, mode="full")
    if not isinstance(mode, Sampling):
        raise ParameterError(f"unknown dyadic mode {mode!r}")
    omegas = _sample_omegas(X, mode)
    counts = np.bincount(omegas)
    histogram = {int(k): int(c) for k, c in enumerate(counts) if c}
    return DyadicStats(X=X, T=p.T, histogram=histogram, count=mode.count, mode="sampled")


@dataclass(frozen=True)
class DyadicMean:
    value: complex
    stderr: float


def dyadic_charfn(X: int, t: float, mode: Mode = FULL) -> DyadicMean:
    """``(1/X) Σ_{X<n<=2X} e^{itω(n)}`` with its standard error (0 when exact)."""

    if mode == FULL:
        stats = dyadic_stats(X, FULL)
        counts = stats.counts().astype(float)
        value = complex(np.exp(1j * t * np.arange(counts.size)) @ counts / stats.count)
        return DyadicMean(value=value, stderr=0.0)
    if not isinstance(mode, Sampling):
        raise ParameterError(f"unknown dyadic mode {mode!r}")
    samples = np.exp(1j * t * _sample_omegas(X, mode))
    mean = complex(samples.mean())
    if samples.size < 2:
        return DyadicMean(value=mean, stderr=float("inf"))
    spread = float(np.sum(np.abs(samples - mean) ** 2)) / (samples.size - 1)
    return DyadicMean(value=mean, stderr=math.sqrt(spread / samples.size))


def dyadic_cdf(X: int, mode: Mode = FULL) -> EmpiricalCdf:
    stats = dyadic_stats(X, mode)
    return EmpiricalCdf.from_histogram(stats.histogram, TheoryParams.for_X(X), window=Window.dyadic(X))


def dyadic_charfn_curve(X: int, taus, mode: Mode = FULL) -> CharCurve:
    stats = dyadic_stats(X, mode)
    values = charfn_from_histogram(stats.histogram, TheoryParams.for_X(X), taus)
    return CharCurve(taus=np.asarray(taus, dtype=float), values=values, provenance=Provenance.DYADIC)


# ---------------------------------------------------------------------------
# π_k counts and the Cauchy formula
# ---------------------------------------------------------------------------


def window_pik(slice_: OmegaSlice, k: int) -> int:
    """``#{n in window : ω(n) = k}``."""

    require(k >= 0, f"k must be >= 0, got {k}")
    return int(slice_.histogram.get(k, 0))


def unit_circle_means(histogram: Mapping[int, int], N: int) -> np.ndarray:
    """``(1/h) Σ_n z_j^{ω(n)}`` at the N-th roots of unity ``z_j``."""

    counts = _dense(histogram)
    z = np.exp(2j * math.pi * np.arange(N) / N)
    return np.power.outer(z, np.arange(counts.size)) @ counts / counts.sum()


def cauchy_recover_counts(slice_: OmegaSlice, N: int = CAUCHY_POINTS) -> np.ndarray:
    """Counts ``#{ω(n) = k}``, ``k < N``, recovered from unit-circle means by an inverse DFT."""

    top = max(slice_.histogram) if slice_.histogram else 0
    if N <= top:
        raise ParameterError(f"N must exceed the largest ω, got N={N}")
    means = unit_circle_means(slice_.histogram, N)
    return np.real(slice_.h * np.fft.fft(means) / N)


# ---------------------------------------------------------------------------
# Smoothing-integral pieces
# ---------------------------------------------------------------------------


def geometric_taus(low: float, high: float, per_decade: int = PROP1_POINTS_PER_DECADE) -> np.ndarray:
    """Positive τ-grid, geometric on ``[low, high]``."""

    require(0 < low < high, f"need 0 < low < high, got ({low}, {high})")
    points = max(2, math.ceil(per_decade * math.log10(high / low)) + 1)
    return np.geomspace(low, high, points)


def symmetric_log_integral(taus: np.ndarray, integrand: Callable[[np.ndarray], np.ndarray]) -> float:
    """``∫_{low<=|τ|<=high} integrand(τ) dτ/|τ|`` by trapezoid in ``log τ`` on both sides."""

    log_t = np.log(taus)
    positive = trapezoid(integrand(taus), log_t)
    negative = trapezoid(integrand(-taus), log_t)
    return float(positive + negative)


@dataclass(frozen=True)
class EsseenSplit:
    """The three pieces of the smoothing integral for one window."""

    I0: float
    I1: float
    I2: float

    @property
    def total(self) -> float:
        return self.I0 + self.I1 + self.I2


def esseen_split(
    slice_: OmegaSlice,
    p: TheoryParams,
    A: float,
    B: float,
    dyadic: Optional[Mapping[int, int]] = None,
    per_decade: int = PROP1_POINTS_PER_DECADE,
) -> EsseenSplit:
    """``I0`` on ``|τ| <= 1/B`` (window vs φ_X), ``I1`` on ``1/B <= |τ| <= A``
    (window vs dyadic block) and ``I2`` on ``1/B <= |τ| <= T`` (dyadic block vs φ_X).
    """

    require(A > 1.0 / B, "A must exceed 1/B")
    histogram = dyadic if dyadic is not None else dyadic_stats(p.X).histogram

    def window_f(t: np.ndarray) -> np.ndarray:
        return charfn_from_histogram(slice_.histogram, p, t)

    def dyadic_f(t: np.ndarray) -> np.ndarray:
        return charfn_from_histogram(histogram, p, t)

    inner = np.linspace(-1.0 / B, 1.0 / B, 2 * per_decade + 1)
    diff0 = np.abs(window_f(inner) - theory.char_phi_X(inner, p))
    I0 = float(trapezoid(theory.divide_by_abs_tau(diff0, inner), inner))

    I1 = symmetric_log_integral(
        geometric_taus(1.0 / B, A, per_decade), lambda t: np.abs(window_f(t) - dyadic_f(t))
    )
    I2 = 0.0
    if p.T > 1.0 / B:
        I2 = symmetric_log_integral(
            geometric_taus(1.0 / B, p.T, per_decade), lambda t: np.abs(dyadic_f(t) - theory.char_phi_X(t, p))
        )
    return EsseenSplit(I0=I0, I1=I1, I2=I2)

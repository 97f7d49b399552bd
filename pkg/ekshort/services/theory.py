"""Theoretical distribution and characteristic functions.

Covers the normal law Φ, the corrected law Φ_X with its jumps, the
characteristic function φ_X = main term + Δ_X, the Mertens constant, the
Selberg–Delange mean A(z)(log X)^{z-1}, and the local-law prediction for
π_k in short windows.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import exp1, ndtr

from ekshort.models.distribution import CharCurve, DistributionFn, sup_distance
from ekshort.models.params import TheoryParams
from ekshort.utils import cache
from ekshort.utils.constants import (
    DEFAULT_PRIME_CUTOFF,
    DELTA_EXTRA_TERMS,
    MIN_PRIME_CUTOFF,
    STIELTJES_NODES,
    STIELTJES_RANGE,
    SUP_GRID_POINTS,
    SUP_GRID_RANGE,
    TWO_PI,
)
from ekshort.utils.validators import ParameterError, require, require_range

logger = logging.getLogger(__name__)

_SQRT_TWO_PI = math.sqrt(TWO_PI)
_JUMP_SNAP = 1e-12

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


# ---------------------------------------------------------------------------
# Mertens constant
# ---------------------------------------------------------------------------


def _check_cutoff(prime_cutoff: int) -> None:
    if prime_cutoff < MIN_PRIME_CUTOFF:
        raise ParameterError(f"prime cutoff must be >= {MIN_PRIME_CUTOFF}, got {prime_cutoff}")


@lru_cache(maxsize=8)
def mertens_partial_sum(prime_cutoff: int) -> float:
    """``γ + Σ_{p <= cutoff} (log(1 - 1/p) + 1/p)``."""

    _check_cutoff(prime_cutoff)
    p = cache.base_primes_cached(prime_cutoff).up_to(prime_cutoff).astype(float)
    terms = np.log1p(-1.0 / p) + 1.0 / p
    return float(np.euler_gamma) + math.fsum(terms)


def mertens_tail_estimate(prime_cutoff: int) -> float:
    """Prime-number-theorem estimate ``-E_1(log N) / 2`` of the omitted tail."""

    return -0.5 * float(exp1(math.log(prime_cutoff)))


def mertens_tail_bound(prime_cutoff: int) -> float:
    """Rigorous bound ``Σ_{p>N} 1/(2p(p-1)) <= 1/(2N)`` on the omitted tail."""

    return 0.5 / prime_cutoff


def mertens_estimate(prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> Tuple[float, float]:
    """The constant together with the reported error bound."""

    value = mertens_partial_sum(prime_cutoff) + mertens_tail_estimate(prime_cutoff)
    return value, mertens_tail_bound(prime_cutoff)


def mertens_constant(prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> float:
    return mertens_estimate(prime_cutoff)[0]


# ---------------------------------------------------------------------------
# Φ and Φ_X
# ---------------------------------------------------------------------------


def _scalar_or_array(values: np.ndarray, like: object):
    return float(values) if np.ndim(like) == 0 else values


def phi(y):
    """Standard normal distribution function."""

    return _scalar_or_array(ndtr(np.asarray(y, dtype=float)), y)


def normal_density(y):
    y = np.asarray(y, dtype=float)
    return np.exp(-0.5 * y * y) / _SQRT_TWO_PI


def _gauss_weight(y: np.ndarray, p: TheoryParams) -> np.ndarray:
    return np.exp(-0.5 * y * y) / math.sqrt(TWO_PI * p.T)


def _correction(y: np.ndarray, p: TheoryParams, *, left: bool) -> np.ndarray:
    a = 2.0 / 3.0 - mertens_constant()
    out = np.zeros_like(y)
    finite = np.isfinite(y)
    yf = y[finite]
    t = p.T + yf * p.sqrt_T
    nearest = np.round(t)
    # Jump points reconstructed from (k - T)/sqrt(T) miss k by rounding.
    on_jump = np.abs(t - nearest) <= _JUMP_SNAP * np.maximum(1.0, np.abs(t))
    if left:
        frac = np.where(on_jump, 1.0, t - np.ceil(t) + 1.0)
    else:
        frac = np.where(on_jump, 0.0, t - np.floor(t))
    out[finite] = _gauss_weight(yf, p) * (a - yf * yf / 6.0 - frac)
    return out


def phi_X(y, p: TheoryParams):
    """``Φ(y) + e^{-y²/2}/sqrt(2πT) (2/3 - c₁ - y²/6 - <T + y sqrt T>)``.

    Right-continuous: at jumps ``<t>`` is taken as 0.
    """

    arr = np.asarray(y, dtype=float)
    return _scalar_or_array(ndtr(arr) + _correction(np.atleast_1d(arr), p, left=False).reshape(arr.shape), y)


def phi_X_left(y, p: TheoryParams):
    """Left limits of :func:`phi_X`."""

    arr = np.asarray(y, dtype=float)
    return _scalar_or_array(ndtr(arr) + _correction(np.atleast_1d(arr), p, left=True).reshape(arr.shape), y)


def phi_X_jumps(p: TheoryParams, y_range: Tuple[float, float] = STIELTJES_RANGE) -> np.ndarray:
    """Jump locations ``(k - T)/sqrt(T)`` inside *y_range*."""

    lo, hi = y_range
    k_lo = math.ceil(p.T + lo * p.sqrt_T)
    k_hi = math.floor(p.T + hi * p.sqrt_T)
    ks = np.arange(k_lo, k_hi + 1, dtype=float)
    return (ks - p.T) / p.sqrt_T


def phi_X_density(y, p: TheoryParams) -> np.ndarray:
    """Derivative of Φ_X between jumps.

    The Gaussian term cancels against the slope of the fractional part,
    leaving ``g'(y)(a - y²/6 - <t>) - g(y) y/3`` with ``g = e^{-y²/2}/sqrt(2πT)``.
    """

    y = np.asarray(y, dtype=float)
    a = 2.0 / 3.0 - mertens_constant()
    t = p.T + y * p.sqrt_T
    frac = t - np.floor(t)
    g = _gauss_weight(y, p)
    return -y * g * (a - y * y / 6.0 - frac) - g * y / 3.0


def phi_X_derivative_bound(p: TheoryParams) -> float:
    """Sup of ``|Φ_X'|`` between jumps, with the fractional part taken worst-case."""

    a = abs(2.0 / 3.0 - mertens_constant())
    y = np.linspace(*STIELTJES_RANGE, 24001)
    bound = np.abs(y) * _gauss_weight(y, p) * (a + y * y / 6.0 + 1.0 + 1.0 / 3.0)
    return float(bound.max())


def phi_X_distribution(p: TheoryParams) -> DistributionFn:
    return DistributionFn(
        value=lambda y: np.asarray(phi_X(np.asarray(y, dtype=float), p)),
        left_value=lambda y: np.asarray(phi_X_left(np.asarray(y, dtype=float), p)),
        jumps=phi_X_jumps(p),
        density=lambda y: phi_X_density(y, p),
        derivative_bound=phi_X_derivative_bound(p),
        name=f"Phi_X(X={p.X})",
    )


def normal_distribution() -> DistributionFn:
    return DistributionFn(
        value=lambda y: ndtr(np.asarray(y, dtype=float)),
        left_value=lambda y: ndtr(np.asarray(y, dtype=float)),
        density=normal_density,
        derivative_bound=1.0 / _SQRT_TWO_PI,
        name="Phi",
    )


# ---------------------------------------------------------------------------
# Characteristic functions
# ---------------------------------------------------------------------------


def default_delta_truncation(tau_max: float, p: TheoryParams) -> int:
    return math.ceil(abs(tau_max) / (TWO_PI * p.sqrt_T)) + DELTA_EXTRA_TERMS


def delta_X(tau, p: TheoryParams, trunc: Optional[int] = None):
    """The jump contribution Δ_X(τ), summed over ``0 < |ν| <= trunc``."""

    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    n = trunc if trunc is not None else default_delta_truncation(float(np.max(np.abs(taus))), p)
    require(n >= 1, f"truncation must be >= 1, got {n}")
    nu = np.concatenate([np.arange(-n, 0), np.arange(1, n + 1)]).astype(float)
    phase = np.exp(2j * math.pi * nu * p.T) / nu
    shifted = taus[:, None] + TWO_PI * p.sqrt_T * nu[None, :]
    series = np.exp(-0.5 * shifted * shifted) @ phase
    out = -taus / (TWO_PI * p.sqrt_T) * series
    return complex(out[0]) if np.ndim(tau) == 0 else out


def char_phi_X(tau, p: TheoryParams):
    """``e^{-τ²/2}(1 + (iτc₁ - iτ³/6)/sqrt T) + Δ_X(τ)``."""

    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    c1 = mertens_constant()
    main = np.exp(-0.5 * taus * taus) * (1.0 + (1j * taus * c1 - 1j * taus**3 / 6.0) / p.sqrt_T)
    out = main + np.atleast_1d(delta_X(taus, p))
    return complex(out[0]) if np.ndim(tau) == 0 else out


def char_phi_X_curve(taus, p: TheoryParams) -> CharCurve:
    return CharCurve(taus=np.asarray(taus, dtype=float), values=char_phi_X(np.asarray(taus, dtype=float), p))


def fourier_stieltjes(G: DistributionFn, taus, y_range: Tuple[float, float] = STIELTJES_RANGE) -> np.ndarray:
    """``∫ e^{iτy} dG(y)``: jump terms plus Gauss–Legendre on each smooth piece."""

    if G.density is None:
        raise ParameterError(f"{G.name or 'distribution'} has no smooth-part density")
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    lo, hi = y_range
    jumps = G.jumps[(G.jumps > lo) & (G.jumps < hi)]
    breaks = np.unique(np.concatenate([jumps, np.arange(math.ceil(lo), math.floor(hi) + 1, dtype=float), [lo, hi]]))

    nodes, weights = np.polynomial.legendre.leggauss(STIELTJES_NODES)
    left, right = breaks[:-1, None], breaks[1:, None]
    ys = (0.5 * (right - left) * nodes[None, :] + 0.5 * (right + left)).ravel()
    ws = (0.5 * (right - left) * weights[None, :]).ravel()
    smooth = np.exp(1j * np.outer(taus, ys)) @ (ws * G.density(ys))

    sizes = G.value(jumps) - G.left_value(jumps)
    atoms = np.exp(1j * np.outer(taus, jumps)) @ sizes
    return smooth + atoms


# ---------------------------------------------------------------------------
# Selberg–Delange mean
# ---------------------------------------------------------------------------


def reciprocal_gamma(z: complex) -> complex:
    """``1/Γ(z)`` by the Lanczos approximation with reflection."""

    z = complex(z)
    if z.real < 0.5:
        return cmath.sin(math.pi * z) * _gamma_right(1.0 - z) / math.pi
    return 1.0 / _gamma_right(z)


def _gamma_right(z: complex) -> complex:
    z -= 1.0
    x = _LANCZOS_COEFFS[0]
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        x += coeff / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * t ** (z + 0.5) * cmath.exp(-t) * x


def euler_product_tail_bound(z: complex, prime_cutoff: int) -> float:
    """``|z|(|z|+1) Σ_{p>N} 1/(p(p-1)) <= |z|(|z|+1)/N``."""

    r = abs(z)
    return r * (r + 1.0) / prime_cutoff


def A_of_z(z: complex, prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> complex:
    """``Γ(z)^{-1} ∏_{p <= N} (1 + z/(p-1)) (1 - 1/p)^z`` for ``|z| <= 2``."""

    z = complex(z)
    require_range("|z|", abs(z), high=2.0)
    _check_cutoff(prime_cutoff)
    p = cache.base_primes_cached(prime_cutoff).up_to(prime_cutoff).astype(float)
    first = 1.0 + z / (p - 1.0)
    if np.any(first == 0):
        return 0j
    log_product = np.sum(np.log(first)) + z * np.sum(np.log1p(-1.0 / p))
    return reciprocal_gamma(z) * cmath.exp(complex(log_product))


def sd_mean_estimate(t: float, p: TheoryParams, prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> Tuple[complex, float]:
    """Main term ``A(e^{it}) (log X)^{e^{it} - 1}`` and its relative error scale ``1/log X``."""

    z = cmath.exp(1j * t)
    value = A_of_z(z, prime_cutoff) * cmath.exp((z - 1.0) * p.T)
    return value, 1.0 / p.log_X


def sd_mean(t: float, p: TheoryParams, prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> complex:
    return sd_mean_estimate(t, p, prime_cutoff)[0]


# ---------------------------------------------------------------------------
# Local law and Esseen bookkeeping
# ---------------------------------------------------------------------------


def pik_prediction(X: int, h: int, k: int) -> float:
    """``h/log X · T^{k-1}/(k-1)!`` evaluated in log space."""

    if k <= 0:
        raise ParameterError(f"k must be >= 1, got {k}")
    p = TheoryParams.for_X(X)
    return h / p.log_X * math.exp((k - 1) * math.log(p.T) - math.lgamma(k))


@dataclass(frozen=True)
class LocalLawThresholds:
    """Logarithms of the smallest admissible ``h`` for the local law."""

    r: float
    log_h_central: float
    log_h_extended: Optional[float]


def local_law_thresholds(X: int, k: int, eps: float = 0.01) -> LocalLawThresholds:
    """``log h`` thresholds ``T^{1/2+ε}`` and ``(log X)^{r log r - r + 1 + ε}`` with ``r = k/T``.

    The extended threshold only exists for ``0 < r < e``.
    """

    require(k >= 1, f"k must be >= 1, got {k}")
    p = TheoryParams.for_X(X)
    r = k / p.T
    central = p.T ** (0.5 + eps)
    extended = None
    if 0.0 < r < math.e:
        extended = p.log_X ** (r * math.log(r) - r + 1.0 + eps)
    return LocalLawThresholds(r=r, log_h_central=central, log_h_extended=extended)


def theorem1_error_shape(X: int, h: int, alpha: float = 1.0) -> float:
    """``log₃X/log₂X + α²(log₂h)²/log h``."""

    p = TheoryParams.for_X(X)
    log_h = math.log(h)
    return math.log(p.T) / p.T + alpha**2 * math.log(log_h) ** 2 / log_h


def theorem1_exceptional_shape(X: int, h: int, alpha: float = 1.0) -> float:
    """Relative size ``(log h)^{-α} + (log X)^{-1/150}`` of the exceptional set."""

    p = TheoryParams.for_X(X)
    return math.log(h) ** (-alpha) + p.log_X ** (-1.0 / 150.0)


@dataclass(frozen=True)
class EsseenParameters:
    A: float
    B: float
    delta1: float
    delta2: float
    regime: str


def esseen_parameters(X: int, h: int, alpha: float = 1.0) -> EsseenParameters:
    """Cutoffs ``A, B`` and exceptional-set levels ``δ₁, δ₂`` for the smoothing split."""

    require(alpha > 0, "alpha must be positive")
    require(h >= 3, f"h must be >= 3, got {h}")
    p = TheoryParams.for_X(X)
    log_h = math.log(h)
    log2_h = math.log(log_h)
    if alpha >= p.log_X ** (1.0 - 2.0 / 150.0):
        return EsseenParameters(A=p.T, B=p.log_X**2, delta1=p.log_X, delta2=1.0, regime="trivial")
    if log2_h > 0 and log_h / (alpha * log2_h) <= p.log_X ** (1.0 / 150.0):
        return EsseenParameters(
            A=min(log_h, p.T),
            B=log_h ** (10.0 * alpha + 1.0),
            delta1=log_h ** (10.0 * alpha),
            delta2=100.0 * alpha * log2_h / log_h,
            regime="short",
        )
    return EsseenParameters(
        A=p.T,
        B=p.log_X**2,
        delta1=p.log_X,
        delta2=100.0 * p.log_X ** (-1.0 / 150.0),
        regime="long",
    )


def prop1_bound_shape(A: float, B: float, delta: float, h: int) -> float:
    """``log(AB) (δ + log₂h/log h)``."""

    log_h = math.log(h)
    return math.log(A * B) * (delta + math.log(log_h) / log_h)


# ---------------------------------------------------------------------------
# Smoothing inequality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothingReport:
    lhs: float
    integral: float
    derivative_term: float

    @property
    def observed_constant(self) -> float:
        """Smallest ``C`` with ``lhs <= C (integral + derivative_term)``."""

        rhs = self.integral + self.derivative_term
        if rhs == 0:
            return 0.0 if self.lhs == 0 else float("inf")
        return self.lhs / rhs


def sup_grid() -> np.ndarray:
    return np.linspace(SUP_GRID_RANGE[0], SUP_GRID_RANGE[1], SUP_GRID_POINTS)


def divide_by_abs_tau(values: np.ndarray, taus: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    nonzero = taus != 0
    out[nonzero] = values[nonzero] / np.abs(taus[nonzero])
    for i in np.flatnonzero(~nonzero):
        neighbours = [out[j] for j in (i - 1, i + 1) if 0 <= j < taus.size and nonzero[j]]
        out[i] = float(np.mean(neighbours)) if neighbours else 0.0
    return out


def smoothing_bound(
    F: DistributionFn,
    G: DistributionFn,
    f: CharCurve,
    g: CharCurve,
    Tparam: float,
) -> SmoothingReport:
    """Both sides of the smoothing inequality; no constant is asserted."""

    if not f.same_grid(g):
        raise ParameterError("characteristic functions must share one τ-grid")
    require(Tparam > 0, "Tparam must be positive")
    taus = f.taus
    slack = 1e-12 * Tparam
    if taus.size < 2 or taus[0] > -Tparam + slack or taus[-1] < Tparam - slack:
        raise ParameterError(f"τ-grid must cover [-{Tparam}, {Tparam}]")
    inside = np.abs(taus) <= Tparam + slack
    t_in = taus[inside]
    integrand = divide_by_abs_tau(np.abs(f.values[inside] - g.values[inside]), t_in)
    integral = float(trapezoid(integrand, t_in)) if t_in.size > 1 else 0.0
    lhs = sup_distance(F, G, sup_grid())
    return SmoothingReport(lhs=lhs, integral=integral, derivative_term=G.derivative_bound / Tparam)

"""Centralised constants used across the toolkit.

Keeping the numeric knobs in one module lets the services, the command line
and the tests agree on grids, cutoffs and output schemas without importing
each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

# Exact-integer ceiling for windows (x + h must fit a signed 64-bit integer).
MAX_WINDOW_END = 2**63 - 1
# Largest base table base_primes() builds.
MAX_PRIME_LIMIT = 10**9
# Integers marked per sieve segment.
SEGMENT_LENGTH = 2**22
# Dyadic blocks above this size must be sampled.
FULL_ENUMERATION_LIMIT = 10**8
# max ω(n) for n < 2^63 (primorial bound).
MAX_OMEGA = 15

# Euler products and the Mertens constant.
DEFAULT_PRIME_CUTOFF = 10**6
MIN_PRIME_CUTOFF = 10**4

# Sup-norm grid: jumps plus uniform points on [-6, 6].
SUP_GRID_POINTS = 10**4
SUP_GRID_RANGE: Tuple[float, float] = (-6.0, 6.0)

# Fourier–Stieltjes quadrature.
STIELTJES_RANGE: Tuple[float, float] = (-12.0, 12.0)
STIELTJES_NODES = 48

# Delta_X truncation: extra terms past |tau| / (2 pi sqrt T).
DELTA_EXTRA_TERMS = 5

# Ladder recipe.
ETA_DEFAULT = 1.0 / 150.0
ETA_MAX = 1.0 / 6.0
MIN_DENSITY_SAMPLES = 10**3

# Pretentious distance lower bound.
DISTANCE_EPSILON = 0.01
# Halász grid density: points per unit of T0.
HALASZ_POINTS_PER_T0 = 4

# Proposition 1 quadrature.
PROP1_POINTS_PER_DECADE = 64
PROP1_CIRCLE_POINTS = 64
CAUCHY_POINTS = 64

# Theorem 1 quantiles reported in summaries.
SUMMARY_QUANTILES: Tuple[float, ...] = (0.10, 0.50, 0.90)

CSV_SCHEMA_VERSION = "1"
CSV_FLOAT_FORMAT = "%.17g"

SUBCOMMANDS = (
    "theorem1",
    "theorem2",
    "prop1",
    "sd-check",
    "ladder",
    "distance",
    "rvh",
    "charfn",
    "selftest",
)

CSV_COLUMNS: Dict[str, Tuple[str, ...]] = {
    "theorem1": ("index", "x", "disc_phiX", "disc_phi"),
    "theorem2": ("index", "x", "count", "prediction", "ratio"),
    "prop1": ("index", "x", "premierpoint", "secondpoint"),
    "sd-check": ("t", "re_emp", "im_emp", "re_theory", "im_theory", "rel_err"),
    "ladder": ("delta", "J", "logP1", "logQ1", "measured", "predicted", "stderr", "bound_shape"),
    "distance": ("x", "lower", "upper", "lhs", "rhs", "korobov_abs", "korobov_abs_alpha0"),
    "rvh": ("u", "re_R", "im_R", "abs_R", "trivial_bound"),
    "charfn": ("tau", "re_emp", "im_emp", "re_theory", "im_theory", "abs_diff"),
    "selftest": ("check", "passed", "detail"),
}

TWO_PI = 2.0 * math.pi


class Provenance:
    """Origin tags carried by characteristic-function curves."""

    WINDOW = "window-empirical"
    DYADIC = "dyadic-empirical"
    THEORY = "theoretical"


class ThetaMap:
    """Names of the tau -> theta maps accepted by the Proposition 1 run."""

    NORMALISED = "normalised"  # theta(tau) = tau / sqrt(T)
    IDENTITY = "identity"  # theta(tau) = tau


THETA_MAPS = (ThetaMap.NORMALISED, ThetaMap.IDENTITY)


@dataclass(frozen=True)
class PrimeCacheFormat:
    """Layout of a persisted prime table."""

    header_dtype: str = "<u8"
    delta_dtype: str = "<u2"
    suffix: str = ".primes"

    def file_name(self, limit: int) -> str:
        return f"primes_{limit}{self.suffix}"


PRIME_CACHE_FORMAT = PrimeCacheFormat()

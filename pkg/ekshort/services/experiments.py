"""Seeded sampled-window experiments.

Every window is keyed by ``(seed, index)``; windows are processed on a
thread pool and collected in index order, so results do not depend on the
worker count.
"""
from __future__ import annotations

import hashlib
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

import numpy as np
from scipy.integrate import trapezoid

from ekshort.models.experiment import ExperimentConfig, ExperimentOutcome, WindowResult
from ekshort.models.ladder import Ladder
from ekshort.models.params import TheoryParams
from ekshort.models.window import FULL, Mode, OmegaSlice, Sampling, Window
from ekshort.services import empirics, ladder as ladder_service, pretentious, theory
from ekshort.services.sieve import omega_window
from ekshort.utils import cache, rng
from ekshort.utils.constants import (
    DEFAULT_PRIME_CUTOFF,
    DISTANCE_EPSILON,
    ETA_DEFAULT,
    FULL_ENUMERATION_LIMIT,
    PROP1_CIRCLE_POINTS,
    PROP1_POINTS_PER_DECADE,
    SUMMARY_QUANTILES,
    SUP_GRID_POINTS,
    SUP_GRID_RANGE,
    ThetaMap,
)
from ekshort.utils.validators import ParameterError

logger = logging.getLogger(__name__)

R = TypeVar("R")

THEOREM2_BAND = (0.6, 1.6)
THEOREM2_EPSILONS = (0.1, 0.25, 0.5)


# ---------------------------------------------------------------------------
# Plumbing
# ---------------------------------------------------------------------------


def window_for(cfg: ExperimentConfig, index: int) -> Window:
    return Window(x=rng.window_start(cfg.seed, index, cfg.X, cfg.h), h=cfg.h)


def window_slice(cfg: ExperimentConfig, index: int) -> OmegaSlice:
    w = window_for(cfg, index)
    return omega_window(w, cache.sieving_table(w.last))


def fan_out(cfg: ExperimentConfig, work: Callable[[int], R]) -> List[R]:
    """Run *work* for every window index; results come back in index order."""

    if cfg.threads == 1:
        return [work(i) for i in range(cfg.samples)]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(work, range(cfg.samples)))


def summarise(values: Sequence[float], prefix: str) -> Dict[str, float]:
    """Exact order-statistic quantiles and the mean."""

    arr = np.asarray(values, dtype=float)
    arr = arr[np.isfinite(arr)]
    out: Dict[str, float] = {}
    if arr.size == 0:
        return out
    for q in SUMMARY_QUANTILES:
        out[f"{prefix}_q{int(round(q * 100))}"] = float(np.quantile(arr, q, method="inverted_cdf"))
    out[f"{prefix}_mean"] = float(arr.mean())
    return out


def dyadic_mode(cfg: ExperimentConfig) -> Mode:
    """Full enumeration unless sampling was requested or ``X`` is too large."""

    if cfg.sampled is not None:
        return Sampling(count=cfg.sampled, seed=cfg.seed)
    if cfg.X > FULL_ENUMERATION_LIMIT:
        raise ParameterError(
            f"X = {cfg.X} exceeds the full-enumeration limit {FULL_ENUMERATION_LIMIT}; pass a sample count"
        )
    return FULL


def _fingerprint(values: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(values).tobytes()).hexdigest()[:16]


def _results_to_rows(results: Sequence[WindowResult]) -> List[Dict[str, Any]]:
    return [r.row() for r in sorted(results, key=lambda r: r.index)]


def _grids_sup() -> Dict[str, Any]:
    return {"sup_grid": {"range": list(SUP_GRID_RANGE), "points": SUP_GRID_POINTS, "plus": "jumps of both"}}


# ---------------------------------------------------------------------------
# Theorem 1
# ---------------------------------------------------------------------------


def run_theorem1(cfg: ExperimentConfig) -> ExperimentOutcome:
    """Sup-norm discrepancy of each sampled window against Φ_X and Φ."""

    p = TheoryParams.for_X(cfg.X)
    phi_X = theory.phi_X_distribution(p)
    normal = theory.normal_distribution()
    dyadic = empirics.dyadic_stats(cfg.X, dyadic_mode(cfg)).histogram if cfg.esseen else None
    esseen = theory.esseen_parameters(cfg.X, cfg.h, cfg.alpha) if cfg.h >= 3 else None
    # esseen_parameters supplies A, B whenever h >= 3.
    A, B = (esseen.A, esseen.B) if esseen is not None else (cfg.A, cfg.B)
    logger.info("theorem1: X=%d h=%d windows=%d threads=%d", cfg.X, cfg.h, cfg.samples, cfg.threads)

    def work(index: int) -> WindowResult:
        slice_ = window_slice(cfg, index)
        F = empirics.empirical_cdf(slice_, p)
        values = {
            "disc_phiX": empirics.sup_discrepancy(F, phi_X),
            "disc_phi": empirics.sup_discrepancy(F, normal),
        }
        if dyadic is not None:
            split = empirics.esseen_split(slice_, p, A, B, dyadic=dyadic)
            values.update({"I0": split.I0, "I1": split.I1, "I2": split.I2})
        return WindowResult(index=index, x=slice_.window.x, values=values)

    results = fan_out(cfg, work)
    disc = np.array([r.values["disc_phiX"] for r in results])
    disc_phi = np.array([r.values["disc_phi"] for r in results])

    summary: Dict[str, Any] = {"T": p.T}
    summary.update(summarise(disc, "disc_phiX"))
    summary.update(summarise(disc_phi, "disc_phi"))
    summary["exceptional_fraction"] = float(np.mean(disc > cfg.threshold))
    summary["exceptional_fraction_phi"] = float(np.mean(disc_phi > cfg.threshold))
    summary["phiX_better_fraction"] = float(np.mean(disc <= disc_phi))
    summary["error_shape"] = theory.theorem1_error_shape(cfg.X, cfg.h, cfg.alpha)
    summary["exceptional_shape"] = theory.theorem1_exceptional_shape(cfg.X, cfg.h, cfg.alpha)
    if esseen is not None:
        summary["esseen_parameters"] = {
            "A": esseen.A,
            "B": esseen.B,
            "delta1": esseen.delta1,
            "delta2": esseen.delta2,
            "regime": esseen.regime,
        }
    if dyadic is not None:
        for piece in ("I0", "I1", "I2"):
            summary.update(summarise([r.values[piece] for r in results], piece))
    return ExperimentOutcome(
        subcommand="theorem1",
        rows=_results_to_rows(results),
        summary=summary,
        grids=_grids_sup(),
        prime_cutoffs={"mertens": DEFAULT_PRIME_CUTOFF},
    )


# ---------------------------------------------------------------------------
# Theorem 2
# ---------------------------------------------------------------------------


def run_theorem2(cfg: ExperimentConfig) -> ExperimentOutcome:
    """Window counts of ``ω(n) = k`` against ``h/log X · T^{k-1}/(k-1)!``."""

    if cfg.k is None or cfg.k < 1:
        raise ParameterError(f"k must be >= 1, got {cfg.k}")
    k = cfg.k
    p = TheoryParams.for_X(cfg.X)
    if abs(k - p.T) > 2.0 * p.sqrt_T:
        logger.warning("k=%d is far from log log X=%.3f; the local law is not expected to hold", k, p.T)
    prediction = theory.pik_prediction(cfg.X, cfg.h, k)
    dyadic_scaled: Optional[float] = None
    if cfg.X <= FULL_ENUMERATION_LIMIT and cfg.sampled is None:
        block = empirics.dyadic_stats(cfg.X, FULL)
        dyadic_scaled = cfg.h / cfg.X * block.histogram.get(k, 0)

    def work(index: int) -> WindowResult:
        slice_ = window_slice(cfg, index)
        count = empirics.window_pik(slice_, k)
        values = {"count": float(count), "prediction": prediction, "ratio": count / prediction}
        if dyadic_scaled:
            values["ratio_dyadic"] = count / dyadic_scaled
        return WindowResult(index=index, x=slice_.window.x, values=values)

    results = fan_out(cfg, work)
    ratios = np.array([r.values["ratio"] for r in results])
    summary: Dict[str, Any] = {"T": p.T, "k": k, "prediction": prediction}
    summary.update(summarise(ratios, "ratio"))
    low, high = THEOREM2_BAND
    summary["band"] = [low, high]
    summary["band_fraction"] = float(np.mean((ratios >= low) & (ratios <= high)))
    for eps in THEOREM2_EPSILONS:
        summary[f"within_{eps:g}"] = float(np.mean(np.abs(ratios - 1.0) <= eps))
    if dyadic_scaled is not None:
        summary["dyadic_scaled_count"] = dyadic_scaled
        if dyadic_scaled:
            summary.update(summarise([r.values["ratio_dyadic"] for r in results], "ratio_dyadic"))
    thresholds = theory.local_law_thresholds(cfg.X, k)
    summary["local_law"] = {
        "r": thresholds.r,
        "log_h": math.log(cfg.h),
        "log_h_central": thresholds.log_h_central,
        "log_h_extended": thresholds.log_h_extended,
    }
    return ExperimentOutcome(subcommand="theorem2", rows=_results_to_rows(results), summary=summary)


# ---------------------------------------------------------------------------
# Proposition 1 integrals
# ---------------------------------------------------------------------------


def theta_of(cfg: ExperimentConfig, p: TheoryParams) -> Callable[[np.ndarray], np.ndarray]:
    if cfg.theta_map == ThetaMap.IDENTITY:
        return lambda tau: tau
    return lambda tau: tau / p.sqrt_T


def run_prop1(cfg: ExperimentConfig) -> ExperimentOutcome:
    """Per-window integrals over ``1/B <= |τ| <= A`` and around the unit circle."""

    if cfg.A <= 1 or cfg.B <= 1:
        raise ParameterError(f"A and B must exceed 1, got A={cfg.A}, B={cfg.B}")
    p = TheoryParams.for_X(cfg.X)
    theta = theta_of(cfg, p)
    taus = empirics.geometric_taus(1.0 / cfg.B, cfg.A, PROP1_POINTS_PER_DECADE)
    log_taus = np.log(taus)
    arc = 2.0 * math.pi / PROP1_CIRCLE_POINTS

    # Dyadic reference, computed once before fan-out.
    mode = dyadic_mode(cfg)
    dyadic = empirics.dyadic_stats(cfg.X, mode).histogram
    ref_pos = empirics.phase_means(dyadic, theta(taus))
    ref_neg = empirics.phase_means(dyadic, theta(-taus))
    ref_circle = empirics.unit_circle_means(dyadic, PROP1_CIRCLE_POINTS)
    for ref in (ref_pos, ref_neg, ref_circle):
        ref.setflags(write=False)
    fingerprint = _fingerprint(np.concatenate([ref_pos, ref_neg, ref_circle]))
    logger.info("prop1: X=%d h=%d windows=%d dyadic=%s", cfg.X, cfg.h, cfg.samples, fingerprint)

    def work(index: int) -> WindowResult:
        slice_ = window_slice(cfg, index)
        hist = slice_.histogram
        pos = np.abs(empirics.phase_means(hist, theta(taus)) - ref_pos)
        neg = np.abs(empirics.phase_means(hist, theta(-taus)) - ref_neg)
        first = float(trapezoid(pos, log_taus) + trapezoid(neg, log_taus))
        second = float(arc * np.sum(np.abs(empirics.unit_circle_means(hist, PROP1_CIRCLE_POINTS) - ref_circle)))
        return WindowResult(index=index, x=slice_.window.x, values={"premierpoint": first, "secondpoint": second})

    results = fan_out(cfg, work)
    summary: Dict[str, Any] = {"T": p.T, "dyadic_reference": fingerprint}
    summary.update(summarise([r.values["premierpoint"] for r in results], "premierpoint"))
    summary.update(summarise([r.values["secondpoint"] for r in results], "secondpoint"))
    summary["bound_shape"] = theory.prop1_bound_shape(cfg.A, cfg.B, cfg.delta, cfg.h)
    grids = {
        "tau": {"low": 1.0 / cfg.B, "high": cfg.A, "points_per_decade": PROP1_POINTS_PER_DECADE, "points": int(taus.size)},
        "theta_map": cfg.theta_map,
        "circle_points": PROP1_CIRCLE_POINTS,
        "dyadic_mode": "full" if mode == FULL else f"sampled({cfg.sampled})",
    }
    return ExperimentOutcome(subcommand="prop1", rows=_results_to_rows(results), summary=summary, grids=grids)


# ---------------------------------------------------------------------------
# Selberg–Delange check
# ---------------------------------------------------------------------------


def run_sd_check(X: int, ts: Sequence[float], mode: Mode = FULL, prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> ExperimentOutcome:
    """``|dyadic mean / main term - 1|`` over a t-grid."""

    p = TheoryParams.for_X(X)
    rows: List[Dict[str, Any]] = []
    scale = 1.0 / p.log_X
    for t in ts:
        emp = empirics.dyadic_charfn(X, float(t), mode)
        main = theory.sd_mean(float(t), p, prime_cutoff)
        rows.append(
            {
                "t": float(t),
                "re_emp": emp.value.real,
                "im_emp": emp.value.imag,
                "re_theory": main.real,
                "im_theory": main.imag,
                "rel_err": abs(emp.value / main - 1.0),
                "stderr": emp.stderr,
            }
        )
    rel = [row["rel_err"] for row in rows]
    summary = {
        "T": p.T,
        "relative_error_scale": scale,
        "max_rel_err": max(rel) if rel else 0.0,
        "max_rel_err_over_scale": (max(rel) / scale) if rel else 0.0,
        # |e^{it}| = 1 for every grid point.
        "euler_product_tail_bound": theory.euler_product_tail_bound(1.0, prime_cutoff),
    }
    return ExperimentOutcome(
        subcommand="sd-check",
        rows=rows,
        summary=summary,
        grids={"t": [float(t) for t in ts]},
        prime_cutoffs={"euler_product": prime_cutoff},
    )


# ---------------------------------------------------------------------------
# Ladder density
# ---------------------------------------------------------------------------


def run_ladder_density(
    X: int,
    h: int,
    deltas: Sequence[float],
    mode: Mode = FULL,
    *,
    eta: float = ETA_DEFAULT,
    strict: bool = False,
) -> ExperimentOutcome:
    """Complement density of the default ladder for each δ."""

    rows: List[Dict[str, Any]] = []
    records: List[str] = []
    for delta in deltas:
        ladder = ladder_service.default_ladder(X, h, float(delta), eta, strict=strict)
        report = ladder_service.complement_density(X, ladder, mode)
        rows.append(
            {
                "delta": float(delta),
                "J": ladder.J,
                "logP1": ladder.logP[0] if ladder.J else math.nan,
                "logQ1": ladder.logQ[0] if ladder.J else math.nan,
                "measured": report.measured,
                "predicted": report.predicted,
                "stderr": report.stderr,
                "bound_shape": ladder_service.ladder_bound_shape(ladder),
            }
        )
        records.append(ladder.to_record())
    ordered = sorted(rows, key=lambda r: r["bound_shape"])
    measured = [r["measured"] for r in ordered]
    summary = {
        "ladders": records,
        "measured_increases_with_bound_shape": all(a <= b for a, b in zip(measured, measured[1:])),
        "strict": strict,
        "eta": eta,
    }
    return ExperimentOutcome(subcommand="ladder", rows=rows, summary=summary, grids={"delta": [float(d) for d in deltas]})


# ---------------------------------------------------------------------------
# Characteristic functions, distances and Dirichlet sums
# ---------------------------------------------------------------------------


def run_charfn(cfg: ExperimentConfig, taus: Sequence[float]) -> ExperimentOutcome:
    """Window (or, with ``h = X``, dyadic) characteristic function against φ_X."""

    p = TheoryParams.for_X(cfg.X)
    grid = np.asarray(sorted(set(float(t) for t in taus)))
    if cfg.h == cfg.X:
        curve = empirics.dyadic_charfn_curve(cfg.X, grid, dyadic_mode(cfg))
        x = cfg.X
    else:
        slice_ = window_slice(cfg, 0)
        curve = empirics.empirical_charfn(slice_, p, grid)
        x = slice_.window.x
    expected = theory.char_phi_X(grid, p)
    diff = np.abs(curve.values - expected)
    rows = [
        {
            "tau": float(t),
            "re_emp": float(v.real),
            "im_emp": float(v.imag),
            "re_theory": float(e.real),
            "im_theory": float(e.imag),
            "abs_diff": float(d),
        }
        for t, v, e, d in zip(grid, curve.values, expected, diff)
    ]
    summary = {"x": x, "provenance": curve.provenance, "max_abs_diff": float(diff.max()) if diff.size else 0.0}
    return ExperimentOutcome(subcommand="charfn", rows=rows, summary=summary, grids={"tau": grid.tolist()})


def run_distance(theta: float, alpha: float, xs: Sequence[int], eps: float = DISTANCE_EPSILON) -> ExperimentOutcome:
    """Restricted distance, its lower-bound shape and the Korobov diagnostic for each ``x``."""

    rows: List[Dict[str, Any]] = []
    for x in xs:
        check = pretentious.distance_lower_bound_check(theta, alpha, int(x), eps)
        a, b = math.floor(check.lower), math.floor(check.upper)
        table = cache.sieving_table(b)
        rows.append(
            {
                "x": int(x),
                "lower": check.lower,
                "upper": check.upper,
                "lhs": check.lhs,
                "rhs": check.rhs,
                "korobov_abs": abs(pretentious.korobov_sum(alpha, a, b, table)),
                "korobov_abs_alpha0": abs(pretentious.korobov_sum(0.0, a, b, table)),
            }
        )
    lhs = [r["lhs"] for r in rows]
    summary = {
        "theta": theta,
        "alpha": alpha,
        "eps": eps,
        "lhs_nondecreasing": all(u <= v for u, v in zip(lhs, lhs[1:])),
    }
    return ExperimentOutcome(subcommand="distance", rows=rows, summary=summary)


def run_rvh(
    X: int,
    us: Sequence[float],
    *,
    v: Optional[float] = None,
    H: Optional[float] = None,
    P: Optional[float] = None,
    Q: Optional[float] = None,
    theta: float = 0.0,
    ladder: Optional[Ladder] = None,
    allow_empty_interval: bool = False,
) -> ExperimentOutcome:
    """``R_{v,H}(u)`` over a u-grid; unset parameters follow the asymptotic defaults."""

    defaults = pretentious.finale_parameters(X)
    H = defaults.H if H is None else H
    P = math.exp(defaults.logP) if P is None else P
    Q = math.exp(defaults.logQ) if Q is None else Q
    v = math.floor(H * math.log(P)) if v is None else v
    ladder = ladder if ladder is not None else Ladder(X=X, eta=ETA_DEFAULT, logP=(), logQ=())
    window = pretentious.rvh_range(X, v, H)
    trivial = pretentious.harmonic_sum(window)
    rows: List[Dict[str, Any]] = []
    for u in us:
        value = pretentious.R_vH(
            float(u), X, v, H, P, Q, ladder, theta, allow_empty_interval=allow_empty_interval
        )
        rows.append(
            {"u": float(u), "re_R": value.real, "im_R": value.imag, "abs_R": abs(value), "trivial_bound": trivial}
        )
    summary = {
        "v": v,
        "H": H,
        "P": P,
        "Q": Q,
        "theta": theta,
        "asymptotic_order_holds": defaults.ordered,
        "range": [window.first, window.last] if window else None,
        "ladder": ladder.to_record(),
    }
    return ExperimentOutcome(subcommand="rvh", rows=rows, summary=summary, grids={"u": [float(u) for u in us]})

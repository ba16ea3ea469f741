"""
Waterfall Threshold Module
gamma_w such that approximating the AWGN frame error probability by a step
(1 below gamma_w, 0 above) reproduces the average FER on the quasi-static
channel: the inverse of the area under P_d(gamma) / gamma^2.
"""

import logging
from typing import Callable, Optional

import numpy as np

from waterfall.models.quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from waterfall.models.simulation import GRID_SPACING_TOLERANCE, FerCurve
from waterfall.models.snr import Snr
from waterfall.models.threshold import WaterfallThreshold
from waterfall.services.numerics import integrate_finite, integrate_semi_infinite
from waterfall.utils.errors import DegenerateInput, NoConvergedRegion, NoWaterfallRegion

logger = logging.getLogger(__name__)

ProbabilityCurve = Callable[[float], float]

SPLIT_POINT = 1.0
DEFAULT_TAIL_FRACTION = 0.01
# largest automatically chosen lower limit; above it the head of pd/gamma^2 matters
MAX_AUTO_FLOOR = 1e-6


def _area(integrand: Callable[[float], float], lower: float, cfg: QuadratureConfig) -> float:
    """Integral of integrand over [lower, inf), split at gamma = 1"""
    if lower < SPLIT_POINT:
        head = integrate_finite(integrand, lower, SPLIT_POINT, cfg)
        return head + integrate_semi_infinite(integrand, SPLIT_POINT, cfg)
    return integrate_semi_infinite(integrand, lower, cfg)


def _default_floor(pd: ProbabilityCurve, cfg: QuadratureConfig) -> float:
    p0 = float(pd(0.0))
    if p0 <= 0.0:
        return 0.0
    floor = p0 / cfg.abs_tol if cfg.abs_tol > 0.0 else float("inf")
    if floor > MAX_AUTO_FLOOR:
        raise DegenerateInput(
            f"pd(0) = {p0:.3g}: pd/gamma^2 is not integrable at gamma = 0",
            hint="pass a positive gamma_floor (--gamma-floor) below the waterfall region",
        )
    logger.debug("pd(0) = %.3g, integrating from %.3g", p0, floor)
    return floor


def waterfall_from_pd(
    pd: ProbabilityCurve,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    gamma_floor: float = 0.0,
    digest: str = "detection probability",
) -> WaterfallThreshold:
    """
    gamma_w = 1 / integral of pd(gamma)/gamma^2 over (gamma_floor, inf).

    With gamma_floor = 0 and pd(0) > 0 the integrand behaves like
    pd(0)/gamma^2 near zero. The lower limit then moves to pd(0) / abs_tol,
    where that head stays below abs_tol; when this limit exceeds
    MAX_AUTO_FLOOR the curve needs an explicit gamma_floor.
    """
    if gamma_floor < 0.0:
        raise DegenerateInput(f"gamma_floor must be non-negative, got {gamma_floor!r}")
    lower = gamma_floor if gamma_floor > 0.0 else _default_floor(pd, cfg)
    area = _area(lambda g: pd(g) / (g * g), lower, cfg)
    if area <= 0.0:
        raise DegenerateInput(f"area under pd/gamma^2 is {area!r}; detection never succeeds")
    return WaterfallThreshold(
        gamma_w=Snr(value=1.0 / area),
        method="closed_form",
        inputs_digest=digest,
    )


def waterfall_from_pe_continuous(
    pe: ProbabilityCurve,
    gamma_prime: Snr,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    digest: str = "frame error probability",
) -> WaterfallThreshold:
    """gamma_w = (1/gamma' - integral of pe/gamma^2 over [gamma', inf))^-1, pe = 1 below gamma'"""
    g0 = gamma_prime.value
    if g0 <= 0.0:
        raise DegenerateInput("gamma' must be positive")
    head = 1.0 / g0
    bracket = head - _area(lambda g: pe(g) / (g * g), g0, cfg)
    if bracket <= 2.0 * cfg.rel_tol * head + cfg.abs_tol:
        raise DegenerateInput(
            f"1/gamma' - tail integral = {bracket!r}; the error curve does not fall "
            f"off fast enough beyond gamma' = {g0!r}",
        )
    return WaterfallThreshold(
        gamma_w=Snr(value=1.0 / bracket),
        method="continuous_error_form",
        inputs_digest=f"{digest}, gamma'={g0!r}",
    )


def waterfall_from_fer_samples(
    curve: FerCurve,
    tail_fraction: Optional[float] = DEFAULT_TAIL_FRACTION,
) -> WaterfallThreshold:
    """
    Discrete form on an equally spaced grid:

        gamma_w = (2/(g[k-1] + g[k]) - dg * sum_{i>=k} fer_i / g_i^2)^-1

    where k is the first point with FER < 1 (a point counts as FER = 1 only
    when no frame was detected). The tail check requires
    fer_N / g_N <= tail_fraction * bracket, bounding the truncated integral.
    """
    rows = [(p.snr, p.fer, p.frames_sent) for p in curve.points]
    if len(rows) < 2:
        raise NoWaterfallRegion("at least two grid points are needed")
    gammas = np.array([r[0] for r in rows], dtype=float)
    fers = np.array([r[1] for r in rows], dtype=float)
    frames_total = int(sum(r[2] for r in rows))

    steps = np.diff(gammas)
    spacing = steps.mean()
    if spacing <= 0.0 or np.max(np.abs(steps - spacing)) / spacing >= GRID_SPACING_TOLERANCE:
        raise DegenerateInput(
            "FER samples must lie on an equally spaced linear SNR grid",
            hint="measure on a SimulationPlan grid",
        )
    if gammas[0] <= 0.0:
        raise DegenerateInput("SNR grid must be positive")

    saturated = fers >= 1.0
    if not saturated[0]:
        raise NoWaterfallRegion(
            f"FER at the lowest grid point ({gammas[0]:.4g}) is already below 1"
        )
    converged = np.flatnonzero(~saturated)
    if converged.size == 0:
        raise NoConvergedRegion(
            f"FER is 1 at every grid point up to {gammas[-1]:.4g}"
        )
    k = int(converged[0])

    tail_sum = float(np.sum(fers[k:] / gammas[k:] ** 2)) * spacing
    bracket = 2.0 / (gammas[k - 1] + gammas[k]) - tail_sum
    if bracket <= 0.0:
        raise DegenerateInput(
            f"bracketed term is {bracket!r}",
            hint="extend the SNR grid to higher values",
        )
    if tail_fraction is not None and fers[-1] / gammas[-1] > tail_fraction * bracket:
        logger.warning(
            "FER %.3g at the top of the grid (%.4g) leaves a truncated tail",
            fers[-1], gammas[-1],
        )
        raise DegenerateInput(
            f"FER {fers[-1]:.3g} at gamma_N = {gammas[-1]:.4g} is too large for the "
            f"high-SNR tail to be neglected",
            hint="extend the SNR grid to higher values",
        )

    return WaterfallThreshold(
        gamma_w=Snr(value=1.0 / bracket),
        method="sample_based",
        inputs_digest=curve.scheme or f"{len(rows)}-point FER curve",
        k_index=k + 1,
        frames_total=frames_total,
    )

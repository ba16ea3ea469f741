"""
Numerics Module
Gaussian tail function and adaptive Gauss-Kronrod quadrature
"""

import heapq
import logging
import math
from typing import Callable, Tuple

import numpy as np
from scipy.special import erfc

from waterfall.models.quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from waterfall.utils.errors import NonConvergence

logger = logging.getLogger(__name__)

Integrand = Callable[[float], float]

# 15-point Kronrod nodes on [-1, 1] with the embedded 7-point Gauss rule
# (weights zero at the Kronrod-only nodes)
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
GAUSS_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


def q_function(x):
    """Q(x) = erfc(x / sqrt(2)) / 2, elementwise for arrays"""
    result = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(result) if np.ndim(result) == 0 else result


def gauss_kronrod(f: Integrand, a: float, b: float) -> Tuple[float, float]:
    """G7/K15 pair on [a, b]: returns (K15 estimate, error estimate)"""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fx = np.array([f(center + half * x) for x in NODES], dtype=float)
    if not np.all(np.isfinite(fx)):
        raise NonConvergence(f"integrand is not finite on [{a!r}, {b!r}]")

    kronrod = half * float(KRONROD_WEIGHTS @ fx)
    gauss = half * float(GAUSS_WEIGHTS @ fx)
    resabs = abs(half) * float(KRONROD_WEIGHTS @ np.abs(fx))
    mean = 0.5 * kronrod / half if half else 0.0
    resasc = abs(half) * float(KRONROD_WEIGHTS @ np.abs(fx - mean))

    error = abs(kronrod - gauss)
    if resasc and error:
        error = resasc * min(1.0, (200.0 * error / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50.0 * _EPS):
        error = max(error, 50.0 * _EPS * resabs)
    return kronrod, error


def integrate_finite(
    f: Integrand,
    a: float,
    b: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """
    Adaptive integral of f over [a, b].

    Global bisection: the interval with the largest error estimate is split
    until the summed error is below max(abs_tol, rel_tol * |result|).
    """
    if a > b:
        raise ValueError(f"integration limits out of order: {a} > {b}")
    if a == b:
        return 0.0

    value, error = gauss_kronrod(f, a, b)
    heap = [(-error, a, b, value)]
    total, total_error = value, error
    subdivisions = 1

    while total_error > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        if subdivisions >= cfg.max_subdivisions:
            logger.warning(
                "quadrature on [%g, %g] stopped at %d subdivisions, error %.3g",
                a, b, subdivisions, total_error,
            )
            raise NonConvergence(
                f"adaptive quadrature did not reach tolerance on [{a!r}, {b!r}] "
                f"(estimated error {total_error:.3g})",
                hint="raise max_subdivisions or loosen the tolerances",
            )
        neg_error, left, right, part = heapq.heappop(heap)
        mid = 0.5 * (left + right)
        left_value, left_error = gauss_kronrod(f, left, mid)
        right_value, right_error = gauss_kronrod(f, mid, right)
        heapq.heappush(heap, (-left_error, left, mid, left_value))
        heapq.heappush(heap, (-right_error, mid, right, right_value))

        total += left_value + right_value - part
        total_error += left_error + right_error + neg_error
        subdivisions += 1

    return math.fsum(item[3] for item in heap)


def integrate_semi_infinite(
    f: Integrand,
    a: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Integral of f over [a, inf) via t = 1/x on (0, 1/a]"""
    if a <= 0.0:
        raise ValueError("semi-infinite integration needs a positive lower limit")

    def substituted(t: float) -> float:
        x = 1.0 / t
        return f(x) * x * x

    return integrate_finite(substituted, 0.0, 1.0 / a, cfg)

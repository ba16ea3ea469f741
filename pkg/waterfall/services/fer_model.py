"""
FER Model Module
Exact and threshold-approximated FER on the quasi-static channel, plus the
normalized detection-probability curves used to compare schemes.
"""

import logging
import math
from typing import Callable, Iterator, List, Sequence, Tuple

import numpy as np
from scipy.special import exp1

from waterfall.models.curves import DetectionCurve, NormalizedCurve, NormalizedPoint
from waterfall.models.quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from waterfall.models.simulation import FerCurve
from waterfall.models.snr import Snr, linear_to_db
from waterfall.models.threshold import WaterfallThreshold
from waterfall.services.channel import fading_density
from waterfall.services.numerics import integrate_finite
from waterfall.utils.errors import DegenerateInput, EmptyCurve, InvalidSnr, LevelNotBracketed

logger = logging.getLogger(__name__)

UPPER_LIMIT_FACTOR = 40.0
# beyond this argument exp(x) * E1(x) is taken from its asymptotic series
_EXP1_SERIES_FROM = 700.0


def _check_avg(avg_snr: Snr) -> float:
    if avg_snr.value <= 0.0:
        raise InvalidSnr(f"average SNR must be positive, got {avg_snr.value!r}")
    return avg_snr.value


def approx_fer(avg_snr: Snr, threshold: WaterfallThreshold) -> float:
    """1 - exp(-gamma_w / avg)"""
    avg = _check_avg(avg_snr)
    return -math.expm1(-threshold.linear / avg)


def exact_fer(
    pe: Callable[[float], float],
    avg_snr: Snr,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """
    Average of the AWGN error probability over the fading density. Quadrature
    runs to 40 * avg; the remainder is pe(40 avg) * e^-40, which bounds it for
    a non-increasing pe.
    """
    avg = _check_avg(avg_snr)
    upper = UPPER_LIMIT_FACTOR * avg
    # pieces double in width from gamma = 1
    edges = [0.0]
    edge = 1.0
    while edge < upper:
        edges.append(edge)
        edge *= 2.0
    edges.append(upper)
    body = math.fsum(
        integrate_finite(lambda g: pe(g) * fading_density(g, avg), a, b, cfg)
        for a, b in zip(edges, edges[1:])
    )
    tail = pe(upper) * math.exp(-UPPER_LIMIT_FACTOR)
    return min(1.0, max(0.0, body + tail))


def _scaled_exp1(x: float) -> float:
    """exp(x) * E1(x) without overflow"""
    if x < _EXP1_SERIES_FROM:
        return float(math.exp(x) * exp1(x))
    return (1.0 - 1.0 / x + 2.0 / (x * x)) / x


def _segment_integrals(
    gammas: np.ndarray, fers: np.ndarray, rate: float
) -> np.ndarray:
    """
    Integral of the interpolated pe against rate * exp(-rate * gamma) over
    each grid segment: log-linear where both ends are positive, linear
    otherwise.
    """
    g0, g1 = gammas[:-1], gammas[1:]
    f0, f1 = fers[:-1], fers[1:]
    h = g1 - g0
    start = np.exp(-rate * g0)

    positive = (f0 > 0.0) & (f1 > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(positive, np.log(np.where(positive, f1 / f0, 1.0)) / h, 0.0)
        c = slope - rate
        ch = c * h
        small = np.abs(ch) < 1e-12
        growth = np.where(small, h, np.expm1(ch) / np.where(small, 1.0, c))
    log_linear = rate * f0 * start * growth

    x = rate * h
    decay = -np.expm1(-x)
    ramp = (decay - x * np.exp(-x)) / rate
    linear = start * (f0 * decay + (f1 - f0) / h * ramp)

    return np.where(positive, log_linear, linear)


def exact_fer_from_samples(curve: FerCurve, avg_snr: Snr) -> float:
    """
    Exact FER from a measured AWGN curve. pe is 1 below the first grid
    point, interpolated between samples, and beyond gamma_N follows
    pe(gamma_N) * (gamma_N / gamma) * exp(-(gamma - gamma_N)).
    """
    avg = _check_avg(avg_snr)
    rows = [(p.snr, p.fer) for p in curve.points]
    if not rows:
        raise EmptyCurve("cannot integrate an empty FER curve")
    gammas = np.array([r[0] for r in rows], dtype=float)
    fers = np.array([r[1] for r in rows], dtype=float)
    rate = 1.0 / avg

    head = -math.expm1(-rate * gammas[0])
    body = float(np.sum(_segment_integrals(gammas, fers, rate))) if gammas.size > 1 else 0.0

    g_n, f_n = gammas[-1], fers[-1]
    tail = 0.0
    if f_n > 0.0 and g_n > 0.0:
        x = (1.0 + rate) * g_n
        tail = f_n * g_n * rate * math.exp(-rate * g_n) * _scaled_exp1(x)
    logger.debug("sampled FER at avg %.4g: head=%.3g body=%.3g tail=%.3g", avg, head, body, tail)
    return min(1.0, max(0.0, head + body + tail))


def normalized_detection_curve(curve: DetectionCurve) -> NormalizedCurve:
    """P_d / gamma^2 with the ideal 1 / gamma^2 envelope on the same grid"""
    points = []
    for gamma, pd in curve.points:
        if gamma <= 0.0:
            raise DegenerateInput(f"cannot normalize at gamma = {gamma!r}")
        envelope = 1.0 / (gamma * gamma)
        points.append(NormalizedPoint(gamma=gamma, value=pd * envelope, envelope=envelope))
    return NormalizedCurve(points=points, label=curve.label)


def normalized_error_curve(curve: DetectionCurve) -> NormalizedCurve:
    """(1 - P_d) / gamma^2 on the same grid; it decays faster than 1 / gamma^2"""
    points = []
    for gamma, pd in curve.points:
        if gamma <= 0.0:
            raise DegenerateInput(f"cannot normalize at gamma = {gamma!r}")
        envelope = 1.0 / (gamma * gamma)
        points.append(NormalizedPoint(gamma=gamma, value=(1.0 - pd) * envelope, envelope=envelope))
    return NormalizedCurve(points=points, label=curve.label, quantity="P_e/gamma^2")


def normalized_area(curve: NormalizedCurve, include_tail: bool = True) -> float:
    """
    Trapezoid area under P_d / gamma^2. The tail beyond the last point is
    taken as P_d(gamma_N) / gamma_N, exact when P_d has saturated there.
    """
    if len(curve.points) < 2:
        raise DegenerateInput("area needs at least two points")
    gammas = np.array([p.gamma for p in curve.points])
    values = np.array([p.value for p in curve.points])
    area = float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(gammas)))
    if include_tail:
        area += values[-1] * gammas[-1]
    return float(area)


def _crossing_db(curve: Sequence[Tuple[float, float]], level: float) -> float:
    pairs = list(curve)
    for (g0, f0), (g1, f1) in zip(pairs, pairs[1:]):
        if f0 == f1 or (f0 - level) * (f1 - level) > 0.0:
            continue
        d0, d1 = linear_to_db(g0), linear_to_db(g1)
        if f0 > 0.0 and f1 > 0.0:
            t = (math.log(level) - math.log(f0)) / (math.log(f1) - math.log(f0))
        else:
            t = (level - f0) / (f1 - f0)
        return d0 + t * (d1 - d0)
    raise LevelNotBracketed(
        f"FER level {level:g} is not crossed by the curve",
        hint="widen the average-SNR range",
    )


def snr_gap_at_fer(
    curve_a: Sequence[Tuple[float, float]],
    curve_b: Sequence[Tuple[float, float]],
    fer_level: float,
) -> float:
    """Horizontal distance in dB between two (avg SNR, FER) curves at fer_level"""
    if not 0.0 < fer_level < 1.0:
        raise LevelNotBracketed(f"FER level must lie in (0, 1), got {fer_level!r}")
    return abs(_crossing_db(curve_a, fer_level) - _crossing_db(curve_b, fer_level))


def curve_pairs(curve: FerCurve) -> List[Tuple[float, float]]:
    return [(p.snr, p.fer) for p in curve.points]


class CountingSequence(Sequence):
    """Read-only sequence that counts element accesses"""

    def __init__(self, items: Sequence):
        self._items = list(items)
        self.accesses = 0

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, index):
        item = self._items[index]
        self.accesses += len(item) if isinstance(index, slice) else 1
        return item

    def __iter__(self) -> Iterator:
        for item in self._items:
            self.accesses += 1
            yield item


def counted_curve(curve: FerCurve) -> Tuple[FerCurve, CountingSequence]:
    """Copy of curve whose points are read through a CountingSequence"""
    counter = CountingSequence(curve.points)
    return curve.model_copy(update={"points": counter}), counter

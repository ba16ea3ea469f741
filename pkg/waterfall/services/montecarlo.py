"""
Monte-Carlo Module
Reproducible FER measurement in AWGN and on the quasi-static fading channel.

Frame j at grid point i always uses the random source derived from
(seed, i, j), so counts do not depend on batch size or worker count.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.stats import norm
from tqdm import tqdm

from waterfall.models.codes import SchemeSpec
from waterfall.models.simulation import FerCurve, FerPoint, SimulationPlan
from waterfall.models.snr import Snr
from waterfall.services.channel import draw_fading_snr
from waterfall.services.link import transmit_and_detect_batch
from waterfall.utils.errors import InvalidSnr

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 256


def frame_rng(seed: int, point_index: int, frame_index: int) -> np.random.Generator:
    """Counter-based source for one frame: Philox keyed by (seed, point, frame)"""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(point_index, frame_index))
    return np.random.Generator(np.random.Philox(sequence))


def _run_point(
    scheme: SchemeSpec,
    point_index: int,
    snr: float,
    fading: bool,
    seed: int,
    stop: Callable[[int, int], bool],
    max_frames: int,
    batch_size: int,
) -> Tuple[int, int]:
    frames = errors = 0
    while True:
        block = min(batch_size, max_frames - frames)
        rngs = [frame_rng(seed, point_index, frames + j) for j in range(block)]
        if fading:
            gammas = [draw_fading_snr(snr, rng) for rng in rngs]
        else:
            gammas = [snr] * block
        detected = transmit_and_detect_batch(scheme, gammas, rngs)
        for ok in detected:
            frames += 1
            errors += not ok
            if stop(frames, errors):
                return frames, errors


class _PlanStop:
    """Picklable stopping rule bound to a plan"""

    def __init__(self, plan: SimulationPlan):
        self.plan = plan

    def __call__(self, frames: int, errors: int) -> bool:
        return self.plan.should_stop(frames, errors)


class _FixedStop:
    def __init__(self, frames: int):
        self.frames = frames

    def __call__(self, frames: int, errors: int) -> bool:
        return frames >= self.frames


def _run_point_task(args) -> Tuple[int, int]:
    return _run_point(*args)


def _run_grid(
    tasks: List[tuple],
    workers: int,
    progress: bool,
    label: str,
) -> List[Tuple[int, int]]:
    bar = tqdm(total=len(tasks), desc=label, disable=not progress, leave=False)
    try:
        if workers <= 1:
            results = []
            for task in tasks:
                results.append(_run_point_task(task))
                bar.update()
            return results
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = []
            for result in pool.map(_run_point_task, tasks):
                results.append(result)
                bar.update()
            return results
    finally:
        bar.close()


def measure_awgn_fer(
    scheme: SchemeSpec,
    plan: SimulationPlan,
    workers: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
    progress: bool = False,
) -> FerCurve:
    """Run transmit_and_detect at every grid point until the plan's stopping rule fires"""
    stop = _PlanStop(plan)
    tasks = [
        (scheme, i, snr, False, plan.seed, stop, plan.max_frames, batch_size)
        for i, snr in enumerate(plan.snr_grid)
    ]
    results = _run_grid(tasks, workers, progress, f"AWGN {scheme.describe()}")

    points = []
    for i, (snr, (frames, errors)) in enumerate(zip(plan.snr_grid, results)):
        logger.info(
            "point %d/%d snr=%.4f frames=%d errors=%d",
            i + 1, len(plan.snr_grid), snr, frames, errors,
        )
        points.append(FerPoint.from_counts(snr, frames, errors))
    return FerCurve(points=points, channel="awgn", scheme=scheme.describe(), seed=plan.seed)


def measure_qsf_fer(
    scheme: SchemeSpec,
    avg_snr_grid: Sequence[Snr],
    frames_per_point: int,
    seed: int,
    workers: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
    progress: bool = False,
) -> FerCurve:
    """Each frame draws its instantaneous SNR from the fading density, then runs one AWGN trial"""
    if frames_per_point < 1:
        raise ValueError("frames_per_point must be at least 1")
    if any(s.value <= 0.0 for s in avg_snr_grid):
        raise InvalidSnr("average SNR values must be positive")

    stop = _FixedStop(frames_per_point)
    tasks = [
        (scheme, i, s.value, True, seed, stop, frames_per_point, batch_size)
        for i, s in enumerate(avg_snr_grid)
    ]
    results = _run_grid(tasks, workers, progress, f"QSF {scheme.describe()}")

    points = []
    for i, (s, (frames, errors)) in enumerate(zip(avg_snr_grid, results)):
        logger.info(
            "point %d/%d avg_snr=%.2f dB frames=%d errors=%d",
            i + 1, len(avg_snr_grid), s.db, frames, errors,
        )
        points.append(FerPoint.from_counts(s.value, frames, errors))
    return FerCurve(points=points, channel="qsf", scheme=scheme.describe(), seed=seed)


def binomial_ci(errors: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for errors/trials"""
    if trials < 1 or not 0 <= errors <= trials:
        raise ValueError(f"invalid counts {errors}/{trials}")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = errors / trials
    z2 = z * z
    denominator = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denominator
    half_width = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denominator
    return max(0.0, center - half_width), min(1.0, center + half_width)


def wilson_bounds(curve: FerCurve, confidence: float = 0.95) -> List[Tuple[float, float]]:
    return [binomial_ci(p.frame_errors, p.frames_sent, confidence) for p in curve.points]


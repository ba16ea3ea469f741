import numpy as np
import pytest
from pydantic import ValidationError

from waterfall.models.codes import SchemeSpec
from waterfall.models.simulation import FerCurve, FerPoint, SimulationPlan
from waterfall.models.snr import Snr
from waterfall.services.fer_model import exact_fer
from waterfall.services.link import uncoded_pe
from waterfall.services.montecarlo import (
    binomial_ci,
    frame_rng,
    measure_awgn_fer,
    measure_qsf_fer,
    wilson_bounds,
)
from waterfall.utils.errors import InvalidSnr


def small_plan(**kwargs) -> SimulationPlan:
    defaults = dict(min_frames=300, max_frames=300, target_errors=None, seed=4)
    defaults.update(kwargs)
    return SimulationPlan.from_step(0.2, 1.0, **defaults)


def test_frame_rng_depends_only_on_its_key():
    a = frame_rng(1, 2, 3).standard_normal(4)
    assert np.array_equal(a, frame_rng(1, 2, 3).standard_normal(4))
    assert not np.array_equal(a, frame_rng(1, 2, 4).standard_normal(4))
    assert not np.array_equal(a, frame_rng(1, 3, 3).standard_normal(4))


def test_plan_grid_from_step():
    plan = SimulationPlan.from_step(0.1, 3.0)
    assert len(plan.snr_grid) == 30
    assert plan.snr_grid[0] == pytest.approx(0.1)
    assert plan.snr_grid[-1] == pytest.approx(3.0)
    assert plan.spacing == pytest.approx(0.1)


def test_plan_rejects_unequal_spacing():
    with pytest.raises(ValidationError):
        SimulationPlan(snr_grid=[0.1, 0.2, 0.4])


def test_plan_rejects_non_positive_grid():
    with pytest.raises(ValidationError):
        SimulationPlan(snr_grid=[0.0, 0.1])


def test_plan_rejects_max_below_min():
    with pytest.raises(ValidationError):
        SimulationPlan(snr_grid=[1.0], min_frames=10, max_frames=5)


def test_awgn_measurement_is_reproducible():
    scheme = SchemeSpec.convolutional(32)
    first = measure_awgn_fer(scheme, small_plan())
    second = measure_awgn_fer(scheme, small_plan())
    assert first == second


def test_batch_size_does_not_change_counts():
    scheme = SchemeSpec.convolutional(32)
    reference = measure_awgn_fer(scheme, small_plan(), batch_size=256)
    assert measure_awgn_fer(scheme, small_plan(), batch_size=7) == reference


def test_worker_count_does_not_change_counts():
    scheme = SchemeSpec.uncoded(8)
    reference = measure_awgn_fer(scheme, small_plan(), workers=1)
    assert measure_awgn_fer(scheme, small_plan(), workers=2) == reference


def test_seed_changes_counts():
    scheme = SchemeSpec.uncoded(8)
    a = measure_awgn_fer(scheme, small_plan(seed=1))
    b = measure_awgn_fer(scheme, small_plan(seed=2))
    assert [p.frame_errors for p in a.points] != [p.frame_errors for p in b.points]


def test_without_target_errors_every_point_runs_max_frames():
    curve = measure_awgn_fer(SchemeSpec.uncoded(64), small_plan(max_frames=450, min_frames=100))
    assert all(p.frames_sent == 450 for p in curve.points)
    assert curve.frames_total == 450 * len(curve)


def test_stops_after_target_errors_once_min_frames_reached():
    plan = SimulationPlan(snr_grid=[0.01], min_frames=10, max_frames=1000, target_errors=5)
    curve = measure_awgn_fer(SchemeSpec.uncoded(256), plan)
    assert curve.points[0].frames_sent == 10
    assert curve.points[0].frame_errors == 10


def test_counts_are_consistent():
    curve = measure_awgn_fer(SchemeSpec.uncoded(16), small_plan())
    for point in curve.points:
        assert 0 <= point.frame_errors <= point.frames_sent
        assert point.fer == point.frame_errors / point.frames_sent


def test_fer_point_rejects_inconsistent_counts():
    with pytest.raises(ValidationError):
        FerPoint(snr=1.0, frames_sent=10, frame_errors=3, fer=0.5)


def test_fer_curve_requires_increasing_snr():
    with pytest.raises(ValidationError):
        FerCurve.from_arrays([1.0, 0.5], [1.0, 0.5])


def test_qsf_measurement_is_reproducible():
    scheme = SchemeSpec.uncoded(64)
    grid = [Snr.from_db(d) for d in (5.0, 10.0)]
    assert measure_qsf_fer(scheme, grid, 400, seed=3) == measure_qsf_fer(scheme, grid, 400, seed=3, batch_size=13)


def test_qsf_fer_saturates_at_very_low_average_snr():
    curve = measure_qsf_fer(SchemeSpec.uncoded(256), [Snr(value=1e-4)], 200, seed=0)
    assert curve.points[0].fer == 1.0
    assert curve.channel == "qsf"


def test_qsf_rejects_non_positive_average():
    with pytest.raises(InvalidSnr):
        measure_qsf_fer(SchemeSpec.uncoded(8), [Snr(value=0.0)], 10, seed=0)


def test_qsf_simulation_agrees_with_exact_integral():
    L = 256
    grid = [Snr.from_db(d) for d in (15.0, 20.0)]
    curve = measure_qsf_fer(SchemeSpec.uncoded(L), grid, 5000, seed=8, batch_size=1024)
    for s, point in zip(grid, curve.points):
        exact = exact_fer(lambda g: uncoded_pe(g, L), s)
        low, high = binomial_ci(point.frame_errors, point.frames_sent, 0.999)
        assert low <= exact <= high


def test_wilson_interval_reference_value():
    low, high = binomial_ci(50, 100, 0.95)
    assert low == pytest.approx(0.404, abs=1e-3)
    assert high == pytest.approx(0.596, abs=1e-3)


def test_wilson_interval_at_the_edges():
    low, high = binomial_ci(0, 40)
    assert low == pytest.approx(0.0, abs=1e-12)
    assert 0.0 < high < 0.15
    low, high = binomial_ci(40, 40)
    assert high >= 1.0 - 1e-12
    assert 0.85 < low < 1.0


@pytest.mark.parametrize("errors,trials,confidence", [(5, 0, 0.95), (11, 10, 0.95), (5, 10, 1.0)])
def test_wilson_interval_rejects_bad_input(errors, trials, confidence):
    with pytest.raises(ValueError):
        binomial_ci(errors, trials, confidence)


def test_wilson_bounds_per_point():
    curve = FerCurve(points=[FerPoint.from_counts(1.0, 100, 50), FerPoint.from_counts(2.0, 100, 0)])
    bounds = wilson_bounds(curve)
    assert bounds[0] == binomial_ci(50, 100)
    assert bounds[1][0] == pytest.approx(0.0, abs=1e-12)

import pytest

from waterfall.models.curves import NormalizedCurve, NormalizedPoint
from waterfall.models.simulation import FerCurve, FerPoint
from waterfall.models.snr import Snr
from waterfall.models.threshold import WaterfallThreshold
from waterfall.utils.errors import ConfigError
from waterfall.utils.serialization import (
    read_fer_curve,
    read_threshold_report,
    threshold_record,
    write_fer_curve,
    write_fer_table,
    write_normalized_curve,
    write_threshold_report,
)


def test_fer_curve_file_keeps_counts(tmp_path):
    path = str(tmp_path / "curve.csv")
    curve = FerCurve(points=[FerPoint.from_counts(0.1, 300, 300), FerPoint.from_counts(0.2, 300, 17)])
    write_fer_curve(path, curve)
    loaded = read_fer_curve(path)
    assert [(p.snr, p.frames_sent, p.frame_errors) for p in loaded.points] == [(0.1, 300, 300), (0.2, 300, 17)]
    assert loaded.points[1].fer == 17 / 300


def test_fer_curve_file_header(tmp_path):
    path = str(tmp_path / "curve.csv")
    write_fer_curve(path, FerCurve.from_arrays([1.0], [0.5]), bounds=[(0.4, 0.6)])
    with open(path) as handle:
        assert handle.readline().strip() == "snr_linear,snr_db,frames,errors,fer,ci_low,ci_high"


def test_reading_a_non_curve_file(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        read_fer_curve(str(path))


def test_reading_a_missing_curve(tmp_path):
    with pytest.raises(ConfigError):
        read_fer_curve(str(tmp_path / "absent.csv"))


def test_threshold_record_fields():
    threshold = WaterfallThreshold(
        gamma_w=Snr.from_db(-0.98321), method="sample_based", k_index=4, frames_total=60000,
    )
    record = dict(threshold_record(threshold))
    assert record["gamma_w_db"] == "-0.9832"
    assert record["k_index"] == "4"
    assert record["frames_total"] == "60000"


def test_threshold_report_text(tmp_path):
    path = str(tmp_path / "t.txt")
    write_threshold_report(path, WaterfallThreshold(gamma_w=Snr(value=2.0), method="closed_form"))
    record = read_threshold_report(path)
    assert record["method"] == "closed_form"
    assert float(record["gamma_w_linear"]) == 2.0
    assert record["k_index"] == ""


def test_normalized_curve_file(tmp_path):
    path = str(tmp_path / "n.csv")
    curve = NormalizedCurve(points=[NormalizedPoint(gamma=1.0, value=0.5, envelope=1.0)], label="uncoded L=8")
    write_normalized_curve(path, curve)
    with open(path) as handle:
        lines = handle.read().splitlines()
    assert lines[0] == "# quantity: P_d/gamma^2 uncoded L=8"
    assert lines[1] == "gamma_linear,gamma_db,value"
    assert lines[2] == "1.0,0.0,0.5"


def test_fer_table_without_exact_column(tmp_path):
    path = str(tmp_path / "fer.csv")
    write_fer_table(path, [10.0, 12.0], [0.3, 0.2])
    with open(path) as handle:
        assert handle.read().splitlines() == ["avg_snr_db,fer_approx", "10.0,0.3", "12.0,0.2"]

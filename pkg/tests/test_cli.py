import csv
import json
import os

import pytest

from waterfall.main import main
from waterfall.models.simulation import FerCurve
from waterfall.models.threshold import WaterfallThreshold
from waterfall.utils.serialization import read_threshold_report, write_fer_curve


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(line for line in handle if not line.startswith("#")))


def run(settings, *argv):
    return main(list(argv), settings=settings)


@pytest.fixture
def hand_curve(tmp_path):
    path = str(tmp_path / "hand.csv")
    write_fer_curve(path, FerCurve.from_arrays([0.5, 1.0, 1.5], [1.0, 0.5, 0.1], channel="awgn"))
    return path


# threshold

@pytest.mark.parametrize("L,expected", [(256, 5.782), (1024, 7.083)])
def test_threshold_uncoded(L, expected, tmp_path, settings, config_path, capsys):
    out = str(tmp_path / "out")
    assert run(settings, "threshold", "--config", config_path(f"uncoded_{L}.ini"), "--out", out) == 0
    record = read_threshold_report(os.path.join(out, f"uncoded_{L}_threshold.txt"))
    assert record["method"] == "closed_form"
    assert float(record["gamma_w_db"]) == pytest.approx(expected, abs=0.005)
    assert list(record) == ["method", "gamma_w_db", "gamma_w_linear", "k_index", "frames_total"]
    assert "gamma_w_db" in capsys.readouterr().out


def test_threshold_structured_output(tmp_path, settings, config_path):
    out = str(tmp_path / "out")
    code = run(settings, "threshold", "--config", config_path("uncoded_256.ini"), "--out", out, "--format", "structured")
    assert code == 0
    with open(os.path.join(out, "uncoded_256_threshold.json")) as handle:
        threshold = WaterfallThreshold.model_validate_json(handle.read())
    assert threshold.db == pytest.approx(5.782, abs=0.005)


def test_threshold_from_stored_curve(tmp_path, settings, config_path, hand_curve):
    out = str(tmp_path / "out")
    code = run(
        settings, "threshold", "--config", config_path("conv_256.ini"),
        "--curve", hand_curve, "--no-tail-check", "--out", out,
    )
    assert code == 0
    record = read_threshold_report(os.path.join(out, "convolutional_256_threshold.txt"))
    assert record["method"] == "sample_based"
    assert record["k_index"] == "2"
    assert float(record["gamma_w_linear"]) == pytest.approx(0.94241, abs=1e-5)
    assert os.path.exists(os.path.join(out, "convolutional_256_awgn_fer.csv"))


def test_threshold_truncated_tail_is_a_numerical_failure(tmp_path, settings, config_path, hand_curve):
    code = run(
        settings, "threshold", "--config", config_path("conv_256.ini"),
        "--curve", hand_curve, "--out", str(tmp_path / "out"),
    )
    assert code == 2
    assert os.path.exists(os.path.join(str(tmp_path / "out"), "convolutional_256_awgn_fer.csv"))


def test_threshold_without_waterfall_region(tmp_path, settings, config_path):
    curve = str(tmp_path / "low.csv")
    write_fer_curve(curve, FerCurve.from_arrays([0.5, 1.0, 1.5], [0.5, 0.1, 0.0], channel="awgn"))
    code = run(settings, "threshold", "--config", config_path("conv_256.ini"), "--curve", curve, "--out", str(tmp_path))
    assert code == 2


@pytest.fixture
def short_uncoded_config(tmp_path):
    path = tmp_path / "uncoded_16.ini"
    path.write_text("[scheme]\nkind = uncoded\nframe_length = 16\n")
    return str(path)


def test_short_uncoded_frame_needs_a_floor(tmp_path, settings, short_uncoded_config, capsys):
    assert run(settings, "threshold", "--config", short_uncoded_config, "--out", str(tmp_path)) == 2
    assert "--gamma-floor" in capsys.readouterr().err


def test_short_uncoded_frame_with_floor(tmp_path, settings, short_uncoded_config):
    out = str(tmp_path / "out")
    code = run(
        settings, "threshold", "--config", short_uncoded_config, "--out", out, "--gamma-floor", "0.05",
    )
    assert code == 0
    record = read_threshold_report(os.path.join(out, "uncoded_16_threshold.txt"))
    assert record["method"] == "closed_form"
    assert float(record["gamma_w_linear"]) > 0.05


def test_coded_threshold_needs_a_plan(tmp_path, settings):
    path = tmp_path / "conv.ini"
    path.write_text("[scheme]\nkind = convolutional\nframe_length = 64\n")
    assert run(settings, "threshold", "--config", str(path), "--out", str(tmp_path)) == 1


def test_threshold_simulated_curve(tmp_path, settings):
    path = tmp_path / "conv.ini"
    path.write_text(
        "[scheme]\nkind = convolutional\nframe_length = 16\n"
        "[plan]\ngrid_step = 0.5\ngrid_stop_db = 17\nmin_frames = 50\nmax_frames = 50\ntarget_errors = inf\nseed = 3\n"
    )
    out = str(tmp_path / "out")
    code = run(settings, "threshold", "--config", str(path), "--out", out, "--no-tail-check")
    rows = read_csv(os.path.join(out, "convolutional_16_awgn_fer.csv"))
    assert rows and all(int(r["frames"]) == 50 for r in rows)
    assert code in (0, 2)


# fer

def test_fer_table_uncoded(tmp_path, settings, config_path):
    out = str(tmp_path / "out")
    code = run(
        settings, "fer", "--config", config_path("uncoded_256.ini"), "--out", out,
        "--avg-start-db", "10", "--avg-stop-db", "30", "--avg-step-db", "1",
    )
    assert code == 0
    rows = read_csv(os.path.join(out, "uncoded_256_fer.csv"))
    assert len(rows) == 21
    approx = [float(r["fer_approx"]) for r in rows]
    exact = [float(r["fer_exact"]) for r in rows]
    assert all(0.0 < value < 1.0 for value in approx + exact)
    assert approx == sorted(approx, reverse=True)


def test_fer_reuses_threshold_report(tmp_path, settings, config_path):
    out = str(tmp_path / "out")
    assert run(settings, "threshold", "--config", config_path("uncoded_256.ini"), "--out", out) == 0
    report = os.path.join(out, "uncoded_256_threshold.txt")
    code = run(
        settings, "fer", "--config", config_path("uncoded_256.ini"), "--out", out,
        "--threshold-report", report, "--no-exact", "--format", "structured",
    )
    assert code == 0
    with open(os.path.join(out, "uncoded_256_fer.json")) as handle:
        table = json.load(handle)
    assert table["gamma_w_db"] == pytest.approx(5.782, abs=0.005)
    assert all(row["fer_exact"] is None for row in table["rows"])
    assert len(table["rows"]) == 11


def test_fer_empty_range_is_a_usage_error(tmp_path, settings, config_path):
    code = run(
        settings, "fer", "--config", config_path("uncoded_256.ini"), "--out", str(tmp_path),
        "--avg-start-db", "30", "--avg-stop-db", "10",
    )
    assert code == 1


def test_fer_bad_threshold_report(tmp_path, settings, config_path):
    bogus = tmp_path / "bogus.txt"
    bogus.write_text("nothing useful\n")
    code = run(
        settings, "fer", "--config", config_path("uncoded_256.ini"), "--out", str(tmp_path),
        "--threshold-report", str(bogus),
    )
    assert code == 1


# simulate

def test_simulate_is_reproducible(tmp_path, settings, config_path):
    outputs = []
    for name in ("a", "b"):
        out = str(tmp_path / name)
        code = run(
            settings, "simulate", "--config", config_path("uncoded_256.ini"),
            "--frames", "200", "--seed", "5", "--out", out,
        )
        assert code == 0
        with open(os.path.join(out, "uncoded_256_qsf_fer.csv")) as handle:
            outputs.append(handle.read())
    assert outputs[0] == outputs[1]
    header = outputs[0].splitlines()[0]
    assert header == "snr_linear,snr_db,frames,errors,fer,ci_low,ci_high"
    assert len(outputs[0].splitlines()) == 12


# perfplot

def test_perfplot_lengths(tmp_path, settings, config_path):
    out = str(tmp_path / "out")
    code = run(
        settings, "perfplot", "--config", config_path("uncoded_256.ini"), "--out", out,
        "--lengths", "256,1024", "--gamma-step", "0.05",
    )
    assert code == 0
    for name in ("uncoded_256_normalized.csv", "uncoded_1024_normalized.csv", "envelope.csv"):
        assert os.path.exists(os.path.join(out, name))
    with open(os.path.join(out, "envelope.csv")) as handle:
        assert handle.readline().startswith("# quantity: 1/gamma^2")
    areas = read_csv(os.path.join(out, "uncoded_areas.csv"))
    assert [int(r["frame_length"]) for r in areas] == [256, 1024]
    assert float(areas[1]["area"]) < float(areas[0]["area"])
    assert all(r["area"][0].isdigit() for r in areas)


def test_perfplot_error_curves(tmp_path, settings, config_path):
    out = str(tmp_path / "out")
    code = run(
        settings, "perfplot", "--config", config_path("uncoded_256.ini"), "--out", out,
        "--gamma-step", "0.05", "--error-curves",
    )
    assert code == 0
    path = os.path.join(out, "uncoded_256_error_normalized.csv")
    with open(path) as handle:
        assert handle.readline() == "# quantity: P_e/gamma^2 uncoded L=256\n"
    detection = read_csv(os.path.join(out, "uncoded_256_normalized.csv"))
    error = read_csv(path)
    assert len(error) == len(detection) > 1000
    first = float(detection[0]["value"]) + float(error[0]["value"])
    assert first == pytest.approx(1.0 / float(error[0]["gamma_linear"]) ** 2, rel=1e-12)


def test_perfplot_rejects_bad_lengths(tmp_path, settings, config_path):
    code = run(settings, "perfplot", "--config", config_path("uncoded_256.ini"), "--out", str(tmp_path), "--lengths", "a,b")
    assert code == 1


# validate

def test_validate_analytic_criteria(tmp_path, settings):
    out = str(tmp_path / "out")
    pdf = str(tmp_path / "acceptance.pdf")
    code = run(settings, "validate", "--out", out, "--pdf", pdf)
    rows = read_csv(os.path.join(out, "acceptance.csv"))
    numbers = {int(r["number"]) for r in rows}
    assert numbers == {1, 2, 7, 8, 9}
    assert all(r["within_tolerance"] == "True" for r in rows)
    # only a slow machine missing a time budget may fail the run
    assert code in (0, 3)
    assert os.path.exists(pdf)


def test_validate_rejects_broken_config(tmp_path, settings):
    path = tmp_path / "broken.ini"
    path.write_text("[scheme]\nkind = uncoded\n")
    assert run(settings, "validate", "--config", str(path), "--out", str(tmp_path)) == 1


# usage

@pytest.mark.parametrize("argv", [[], ["bogus"], ["threshold"], ["threshold", "--seed", "x"]])
def test_usage_errors_exit_1(argv, settings):
    assert main(argv, settings=settings) == 1

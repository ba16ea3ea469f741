"""
Serialization helpers
CSV files with fixed headers and round-trip float formatting, and the
structured key/value threshold record.
"""

import csv
import os
from typing import Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from waterfall.models.curves import NormalizedCurve
from waterfall.models.simulation import FerCurve, FerPoint
from waterfall.models.snr import linear_to_db
from waterfall.models.threshold import WaterfallThreshold
from waterfall.utils.errors import ConfigError

FER_CURVE_HEADER = ["snr_linear", "snr_db", "frames", "errors", "fer"]
QSF_CURVE_HEADER = FER_CURVE_HEADER + ["ci_low", "ci_high"]
NORMALIZED_HEADER = ["gamma_linear", "gamma_db", "value"]
THRESHOLD_FIELDS = ["method", "gamma_w_db", "gamma_w_linear", "k_index", "frames_total"]


def fmt(value: float) -> str:
    """Shortest string that reads back as the same float"""
    return repr(float(value))


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_fer_curve(
    path: str,
    curve: FerCurve,
    bounds: Optional[Sequence[Tuple[float, float]]] = None,
) -> str:
    _ensure_parent(path)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(QSF_CURVE_HEADER if bounds is not None else FER_CURVE_HEADER)
        for i, point in enumerate(curve.points):
            row = [
                fmt(point.snr),
                fmt(point.snr_db),
                str(point.frames_sent),
                str(point.frame_errors),
                fmt(point.fer),
            ]
            if bounds is not None:
                row += [fmt(bounds[i][0]), fmt(bounds[i][1])]
            writer.writerow(row)
    return path


def read_fer_curve(path: str, channel: str = "awgn", scheme: str = "") -> FerCurve:
    """Load a FerCurve written by write_fer_curve"""
    try:
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
    except OSError as exc:
        raise ConfigError(f"cannot read FER curve {path}: {exc}") from exc
    points = []
    for row in rows:
        try:
            frames = int(row["frames"])
            errors = int(row["errors"])
            snr = float(row["snr_linear"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(
                f"{path} is not a FER curve file",
                hint=f"expected columns {','.join(FER_CURVE_HEADER)}",
            ) from exc
        if frames:
            points.append(FerPoint.from_counts(snr, frames, errors))
        else:
            points.append(FerPoint(snr=snr, fer=float(row["fer"])))
    return FerCurve(points=points, channel=channel, scheme=scheme)


def write_normalized_curve(path: str, curve: NormalizedCurve, envelope: bool = False) -> str:
    """The normalized curve (or its 1 / gamma^2 envelope) with a quantity header comment"""
    _ensure_parent(path)
    quantity = "1/gamma^2 ideal envelope" if envelope else f"{curve.quantity} {curve.label}".rstrip()
    with open(path, "w", newline="") as handle:
        handle.write(f"# quantity: {quantity}\n")
        writer = csv.writer(handle)
        writer.writerow(NORMALIZED_HEADER)
        for point in curve.points:
            value = point.envelope if envelope else point.value
            writer.writerow([fmt(point.gamma), fmt(linear_to_db(point.gamma)), fmt(value)])
    return path


def write_fer_table(
    path: str,
    avg_snr_db: Sequence[float],
    approx: Sequence[float],
    exact: Optional[Sequence[float]] = None,
) -> str:
    _ensure_parent(path)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        header = ["avg_snr_db", "fer_approx"] + (["fer_exact"] if exact is not None else [])
        writer.writerow(header)
        for i, level in enumerate(avg_snr_db):
            row = [fmt(level), fmt(approx[i])]
            if exact is not None:
                row.append(fmt(exact[i]))
            writer.writerow(row)
    return path


def threshold_record(threshold: WaterfallThreshold) -> List[Tuple[str, str]]:
    """Report fields in fixed order; gamma_w_db to 4 significant figures"""
    return [
        ("method", threshold.method),
        ("gamma_w_db", f"{threshold.db:.4g}"),
        ("gamma_w_linear", fmt(threshold.linear)),
        ("k_index", "" if threshold.k_index is None else str(threshold.k_index)),
        ("frames_total", "" if threshold.frames_total is None else str(threshold.frames_total)),
    ]


def write_threshold_report(path: str, threshold: WaterfallThreshold, structured: bool = False) -> str:
    """key = value text record, or JSON of the full model when structured"""
    _ensure_parent(path)
    with open(path, "w") as handle:
        if structured:
            handle.write(threshold.model_dump_json(indent=2))
            handle.write("\n")
        else:
            for key, value in threshold_record(threshold):
                handle.write(f"{key} = {value}\n")
    return path


def read_threshold_report(path: str) -> dict:
    record = {}
    with open(path) as handle:
        for line in handle:
            if "=" in line:
                key, _, value = line.partition("=")
                record[key.strip()] = value.strip()
    return record


def write_json(path: str, model: BaseModel) -> str:
    _ensure_parent(path)
    with open(path, "w") as handle:
        handle.write(model.model_dump_json(indent=2))
        handle.write("\n")
    return path


def write_rows(path: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    _ensure_parent(path)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    return path

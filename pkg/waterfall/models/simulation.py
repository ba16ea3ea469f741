"""
Monte-Carlo plans and measured frame error rate curves
"""

import math
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from waterfall.models.snr import linear_to_db

GRID_SPACING_TOLERANCE = 1e-9


class SimulationPlan(BaseModel):
    """Equally spaced linear-SNR grid plus stopping rule and master seed"""

    model_config = ConfigDict(frozen=True)

    snr_grid: List[float] = Field(min_length=1)
    min_frames: int = Field(default=2000, ge=1)
    max_frames: int = Field(default=5000, ge=1)
    target_errors: Optional[int] = Field(default=200, ge=1)  # None = never stop early
    seed: int = 0

    @model_validator(mode="after")
    def check_grid(self) -> "SimulationPlan":
        grid = np.asarray(self.snr_grid, dtype=float)
        if np.any(grid <= 0.0):
            raise ValueError("SNR grid values must be positive")
        if grid.size > 1:
            steps = np.diff(grid)
            if np.any(steps <= 0.0):
                raise ValueError("SNR grid must be strictly increasing")
            spacing = steps.mean()
            if np.max(np.abs(steps - spacing)) / spacing >= GRID_SPACING_TOLERANCE:
                raise ValueError("SNR grid must be equally spaced in linear scale")
        if self.max_frames < self.min_frames:
            raise ValueError("max_frames must be >= min_frames")
        return self

    @classmethod
    def from_step(
        cls,
        step: float,
        stop: float,
        start: Optional[float] = None,
        **kwargs,
    ) -> "SimulationPlan":
        """Grid start, start+step, ... <= stop; start defaults to step, i.e. (0, stop]"""
        if step <= 0.0:
            raise ValueError("grid step must be positive")
        first = step if start is None else start
        count = int(math.floor((stop - first) / step + 1e-9)) + 1
        if count < 1:
            raise ValueError("empty SNR grid")
        grid = first + step * np.arange(count)
        return cls(snr_grid=grid.tolist(), **kwargs)

    @property
    def spacing(self) -> float:
        if len(self.snr_grid) < 2:
            return 0.0
        return (self.snr_grid[-1] - self.snr_grid[0]) / (len(self.snr_grid) - 1)

    def should_stop(self, frames: int, errors: int) -> bool:
        if frames >= self.max_frames:
            return True
        if self.target_errors is None:
            return False
        return errors >= self.target_errors and frames >= self.min_frames


class FerPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    snr: float = Field(ge=0.0)
    frames_sent: int = Field(default=0, ge=0)
    frame_errors: int = Field(default=0, ge=0)
    fer: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def counts_match(self) -> "FerPoint":
        if self.frames_sent:
            if self.frame_errors > self.frames_sent:
                raise ValueError("more frame errors than frames")
            if self.fer != self.frame_errors / self.frames_sent:
                raise ValueError("fer must equal frame_errors / frames_sent")
        elif self.frame_errors:
            raise ValueError("frame errors recorded without frames")
        return self

    @classmethod
    def from_counts(cls, snr: float, frames: int, errors: int) -> "FerPoint":
        return cls(snr=snr, frames_sent=frames, frame_errors=errors, fer=errors / frames)

    @property
    def snr_db(self) -> float:
        return linear_to_db(self.snr)


class FerCurve(BaseModel):
    """FER samples on an increasing SNR grid (AWGN: gamma, QSF: average gamma)"""

    points: List[FerPoint]
    channel: Literal["awgn", "qsf", "analytic"] = "awgn"
    scheme: str = ""
    seed: Optional[int] = None

    @model_validator(mode="after")
    def increasing_snr(self) -> "FerCurve":
        snrs = [p.snr for p in self.points]
        if any(b <= a for a, b in zip(snrs, snrs[1:])):
            raise ValueError("FER curve SNR values must be strictly increasing")
        return self

    @classmethod
    def from_arrays(cls, snrs, fers, channel: str = "analytic", scheme: str = "") -> "FerCurve":
        points = [FerPoint(snr=float(s), fer=float(f)) for s, f in zip(snrs, fers)]
        return cls(points=points, channel=channel, scheme=scheme)

    @property
    def frames_total(self) -> int:
        return sum(p.frames_sent for p in self.points)

    def __len__(self) -> int:
        return len(self.points)

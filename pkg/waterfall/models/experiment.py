"""
Experiment configuration
INI files with [scheme], [plan], [fading] and [outputs] sections. SNR levels
are written in dB and converted once here; the grid step is linear.
"""

import configparser
import math
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from waterfall.models.codes import ConvCodeSpec, SchemeSpec
from waterfall.models.simulation import SimulationPlan
from waterfall.models.snr import Snr, db_to_linear
from waterfall.utils.errors import ConfigError


class SchemeSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["uncoded", "convolutional", "turbo"]
    frame_length: int = Field(ge=1)
    feedforward_octal: Optional[int] = None
    feedback_octal: Optional[int] = None
    memory: Optional[int] = None
    terminated: bool = True
    iterations: int = Field(default=8, ge=1)
    interleaver_seed: int = 1

    def build(self) -> SchemeSpec:
        if self.kind == "uncoded":
            return SchemeSpec.uncoded(self.frame_length)
        defaults = {"convolutional": (17, 15, 3), "turbo": (5, 7, 2)}[self.kind]
        code = ConvCodeSpec(
            feedforward_octal=self.feedforward_octal or defaults[0],
            feedback_octal=self.feedback_octal or defaults[1],
            memory=self.memory or defaults[2],
            terminated=self.terminated,
        )
        if self.kind == "convolutional":
            return SchemeSpec.convolutional(self.frame_length, code)
        return SchemeSpec.turbo_code(self.frame_length, self.interleaver_seed, self.iterations, code)


class PlanSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grid_step: float = Field(gt=0.0)
    grid_stop_db: float
    grid_start_db: Optional[float] = None
    min_frames: int = Field(default=2000, ge=1)
    max_frames: int = Field(default=5000, ge=1)
    target_errors: Optional[int] = Field(default=200, ge=1)
    seed: int = 0

    @field_validator("target_errors", mode="before")
    @classmethod
    def infinite_means_none(cls, v):
        if isinstance(v, str) and v.strip().lower() in ("", "inf", "none"):
            return None
        return v

    @model_validator(mode="after")
    def start_positive(self) -> "PlanSection":
        if self.start <= 0.0:
            raise ValueError("grid start must be positive")
        if db_to_linear(self.grid_stop_db) < self.start:
            raise ValueError("grid stop lies below grid start")
        return self

    @property
    def start(self) -> float:
        if self.grid_start_db is None:
            return self.grid_step
        return db_to_linear(self.grid_start_db)

    def build(self, seed: Optional[int] = None) -> SimulationPlan:
        return SimulationPlan.from_step(
            self.grid_step,
            db_to_linear(self.grid_stop_db),
            self.start,
            min_frames=self.min_frames,
            max_frames=self.max_frames,
            target_errors=self.target_errors,
            seed=self.seed if seed is None else seed,
        )


class FadingSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    avg_snr_start_db: float = 0.0
    avg_snr_stop_db: float = 30.0
    avg_snr_step_db: float = Field(default=2.0, gt=0.0)
    frames_per_point: int = Field(default=10_000, ge=1)

    @model_validator(mode="after")
    def ordered(self) -> "FadingSection":
        if self.avg_snr_stop_db < self.avg_snr_start_db:
            raise ValueError("avg_snr_stop_db lies below avg_snr_start_db")
        return self

    def levels_db(self) -> List[float]:
        count = int(math.floor((self.avg_snr_stop_db - self.avg_snr_start_db) / self.avg_snr_step_db + 1e-9)) + 1
        return (self.avg_snr_start_db + self.avg_snr_step_db * np.arange(count)).tolist()

    def grid(self) -> List[Snr]:
        return [Snr.from_db(level) for level in self.levels_db()]


class OutputsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = "results"
    formats: List[Literal["csv", "structured"]] = ["csv"]

    @field_validator("formats", mode="before")
    @classmethod
    def split_list(cls, v):
        if isinstance(v, str):
            return [item.strip() for item in v.split(",") if item.strip()]
        return v


class ExperimentConfig(BaseModel):
    scheme: SchemeSection
    plan: Optional[PlanSection] = None
    fading: FadingSection = FadingSection()
    outputs: OutputsSection = OutputsSection()
    source: str = ""

    @property
    def scheme_spec(self) -> SchemeSpec:
        return self.scheme.build()

    def simulation_plan(self, seed: Optional[int] = None) -> SimulationPlan:
        if self.plan is None:
            raise ConfigError(
                f"{self.source or 'config'} has no [plan] section",
                hint="coded schemes need a [plan] grid for AWGN simulation",
            )
        return self.plan.build(seed)


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        where = ".".join(str(item) for item in error["loc"])
        parts.append(f"{where}: {error['msg']}" if where else error["msg"])
    return "; ".join(parts)


def load_experiment(path: str) -> ExperimentConfig:
    """Parse and validate an experiment file; every failure is a ConfigError"""
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if not parser.has_section("scheme"):
        raise ConfigError(f"{path} has no [scheme] section")

    unknown = set(parser.sections()) - {"scheme", "plan", "fading", "outputs"}
    if unknown:
        raise ConfigError(f"{path}: unknown sections {sorted(unknown)}")

    data = {name: dict(parser.items(name)) for name in parser.sections()}
    try:
        config = ExperimentConfig(source=path, **data)
        # building the models runs their invariants before any simulation
        config.scheme_spec
        if config.plan is not None:
            config.simulation_plan()
    except ValidationError as exc:
        raise ConfigError(f"{path}: {_validation_message(exc)}") from exc
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config

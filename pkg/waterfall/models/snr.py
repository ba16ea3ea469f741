"""
Signal-to-noise ratio
Stored in linear scale; dB only at the edges (config files, reports).
"""

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value == 0.0:
        return -math.inf
    return 10.0 * math.log10(value)


class Snr(BaseModel):
    """Ratio of energies (Es/N0 per channel symbol), linear scale"""

    model_config = ConfigDict(frozen=True)

    value: float = Field(ge=0.0)

    @field_validator("value")
    @classmethod
    def not_nan(cls, v: float) -> float:
        if math.isnan(v):
            raise ValueError("SNR must be a number")
        return v

    @classmethod
    def from_db(cls, value_db: float) -> "Snr":
        return cls(value=db_to_linear(value_db))

    @property
    def db(self) -> float:
        return linear_to_db(self.value)

    def __float__(self) -> float:
        return self.value

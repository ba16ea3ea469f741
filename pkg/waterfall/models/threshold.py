from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, field_validator

from waterfall.models.snr import Snr


class WaterfallThreshold(BaseModel):
    """Waterfall threshold gamma_w and how it was obtained"""

    model_config = ConfigDict(frozen=True)

    gamma_w: Snr
    method: Literal["closed_form", "continuous_error_form", "sample_based"]
    inputs_digest: str = ""
    k_index: Optional[int] = None  # sample_based only, 1-based
    frames_total: Optional[int] = None

    @field_validator("gamma_w")
    @classmethod
    def positive(cls, v: Snr) -> Snr:
        if v.value <= 0.0:
            raise ValueError("waterfall threshold must be positive")
        return v

    @property
    def linear(self) -> float:
        return self.gamma_w.value

    @property
    def db(self) -> float:
        return self.gamma_w.db

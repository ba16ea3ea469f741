"""
Frame containers passed between modulator, channel and decoders
"""

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from waterfall.models.snr import Snr

# Real log-likelihood ratios, LLR > 0 favours bit 0. Shape (n,) for one
# frame or (frames, n) for a batch.
LlrFrame = npt.NDArray[np.float64]


class ModulatedFrame(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    symbols: np.ndarray
    symbol_energy: float = Field(gt=0.0)

    @model_validator(mode="after")
    def constant_envelope(self) -> "ModulatedFrame":
        amplitude = np.sqrt(self.symbol_energy)
        if self.symbols.size and not np.allclose(np.abs(self.symbols), amplitude):
            raise ValueError("every BPSK symbol must have magnitude sqrt(Es)")
        return self

    def __len__(self) -> int:
        return int(self.symbols.shape[-1])


class ReceivedFrame(BaseModel):
    """Real samples after coherent combining at a known instantaneous SNR"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    samples: np.ndarray
    instantaneous_snr: Snr
    symbol_energy: float = Field(default=1.0, gt=0.0)

    def __len__(self) -> int:
        return int(self.samples.shape[-1])

    def llrs(self) -> LlrFrame:
        """Channel LLRs 4*gamma*r with r normalized to unit amplitude"""
        r = self.samples / np.sqrt(self.symbol_energy)
        return 4.0 * self.instantaneous_snr.value * r

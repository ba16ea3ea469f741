"""
Channel Module
BPSK modulation, AWGN and quasi-static Rayleigh fading in equivalent-SNR form.

With perfect CSI, coherent combining by h*/|h| turns a quasi-static frame
into an AWGN frame at gamma = |h|^2 Es/N0, so fading is simulated by drawing
gamma from the chi-square(2) density and running the AWGN chain at it.
"""

import math

import numpy as np

from waterfall.models.frames import ModulatedFrame, ReceivedFrame
from waterfall.models.snr import Snr
from waterfall.utils.errors import InvalidSnr


def bpsk_symbols(bits, symbol_energy: float = 1.0) -> np.ndarray:
    """0 -> +sqrt(Es), 1 -> -sqrt(Es); works on any array shape"""
    bits = np.asarray(bits, dtype=np.int8)
    return math.sqrt(symbol_energy) * (1.0 - 2.0 * bits)


def noise_std(snr_value: float, symbol_energy: float = 1.0) -> float:
    """Per-dimension noise standard deviation giving Es / N0 = snr_value"""
    if snr_value <= 0.0:
        raise InvalidSnr(f"AWGN needs a positive SNR, got {snr_value}")
    return math.sqrt(symbol_energy / (2.0 * snr_value))


def draw_fading_snr(avg_snr: float, rng: np.random.Generator, size=None):
    """Inverse-CDF draw gamma = -avg * ln(u), u uniform on (0, 1]"""
    if size is None:
        return -avg_snr * math.log(1.0 - rng.random())
    return -avg_snr * np.log(1.0 - rng.random(size))


def bpsk_modulate(bits, symbol_energy: float = 1.0) -> ModulatedFrame:
    return ModulatedFrame(
        symbols=bpsk_symbols(bits, symbol_energy).astype(float),
        symbol_energy=symbol_energy,
    )


def add_awgn(frame: ModulatedFrame, snr: Snr, rng: np.random.Generator) -> ReceivedFrame:
    sigma = noise_std(snr.value, frame.symbol_energy)
    noise = sigma * rng.standard_normal(frame.symbols.shape)
    return ReceivedFrame(
        samples=frame.symbols + noise,
        instantaneous_snr=snr,
        symbol_energy=frame.symbol_energy,
    )


def sample_instantaneous_snr(avg_snr: Snr, rng: np.random.Generator) -> Snr:
    if avg_snr.value <= 0.0:
        raise InvalidSnr("average SNR must be positive")
    return Snr(value=draw_fading_snr(avg_snr.value, rng))


def fading_density(gamma, avg_snr: float):
    """(1/avg) exp(-gamma/avg) for gamma >= 0, elementwise"""
    gamma = np.asarray(gamma, dtype=float)
    density = np.where(gamma >= 0.0, np.exp(-gamma / avg_snr) / avg_snr, 0.0)
    return float(density) if density.ndim == 0 else density


def fading_snr_pdf(gamma: Snr, avg_snr: Snr) -> float:
    if avg_snr.value <= 0.0:
        raise InvalidSnr("average SNR must be positive")
    return fading_density(gamma.value, avg_snr.value)

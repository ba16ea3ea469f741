"""
Link Module
End-to-end BPSK trials for each transmission scheme, and the closed-form
frame detection probability of uncoded BPSK.
"""

from typing import Sequence, Union

import numpy as np

from waterfall.models.codes import SchemeSpec
from waterfall.models.snr import Snr
from waterfall.services.channel import add_awgn, bpsk_modulate
from waterfall.services.numerics import q_function
from waterfall.services.trellis import rsc_encode, interleave_streams, viterbi_decode
from waterfall.services.turbo import turbo_codeword, turbo_decode

SYMBOL_ENERGY = 1.0


def _log_detection(gamma, frame_length: int):
    gamma = np.maximum(np.asarray(gamma, dtype=float), 0.0)
    return frame_length * np.log1p(-q_function(np.sqrt(2.0 * gamma)))


def uncoded_pd(gamma, frame_length: int):
    """(1 - Q(sqrt(2 gamma)))^L for linear SNR values, elementwise"""
    result = np.exp(_log_detection(gamma, frame_length))
    return float(result) if np.ndim(result) == 0 else result


def uncoded_pe(gamma, frame_length: int):
    """1 - P_d, computed without cancellation at high SNR"""
    result = -np.expm1(_log_detection(gamma, frame_length))
    return float(result) if np.ndim(result) == 0 else result


def uncoded_detection_probability(gamma: Union[Snr, float], frame_length: int) -> float:
    if frame_length < 1:
        raise ValueError("frame length must be at least 1")
    return uncoded_pd(float(gamma), frame_length)


def encode_frames(scheme: SchemeSpec, bits: np.ndarray) -> np.ndarray:
    """Information bits (frames, L) -> code bits (frames, n)"""
    if scheme.kind == "uncoded":
        return bits
    if scheme.kind == "convolutional":
        systematic, parity = rsc_encode(bits, scheme.code)
        return interleave_streams(systematic, parity)
    return turbo_codeword(bits, scheme.turbo)


def decode_frames(scheme: SchemeSpec, llrs: np.ndarray) -> np.ndarray:
    if scheme.kind == "uncoded":
        return (llrs < 0.0).astype(np.int8)
    if scheme.kind == "convolutional":
        return viterbi_decode(llrs, scheme.code)
    return turbo_decode(llrs, scheme.turbo)


def transmit_and_detect_batch(
    scheme: SchemeSpec,
    gammas: Sequence[float],
    rngs: Sequence[np.random.Generator],
) -> np.ndarray:
    """
    One AWGN trial per (gamma, rng) pair; True where all L information bits
    are recovered. Each frame draws its bits and then its noise from its own
    random source, so outcomes do not depend on how frames are batched.
    """
    L = scheme.frame_length
    bits = np.stack([rng.integers(0, 2, size=L, dtype=np.int8) for rng in rngs])
    codewords = encode_frames(scheme, bits)
    llrs = np.stack([
        add_awgn(bpsk_modulate(codeword, SYMBOL_ENERGY), Snr(value=float(gamma)), rng).llrs()
        for codeword, gamma, rng in zip(codewords, gammas, rngs)
    ])
    decoded = decode_frames(scheme, llrs)
    return np.all(decoded == bits, axis=1)


def transmit_and_detect(scheme: SchemeSpec, gamma: Snr, rng: np.random.Generator) -> bool:
    return bool(transmit_and_detect_batch(scheme, [gamma.value], [rng])[0])

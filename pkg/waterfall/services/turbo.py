"""
Turbo Code Module
Parallel concatenation of two identical RSC encoders through a pseudo-random
interleaver, decoded by iterative exchange of log-MAP extrinsic information.

Codeword layout: systematic (L+m) | parity 1 (L+m) | parity 2 (L).
"""

from typing import List, Tuple

import numpy as np

from waterfall.models.codes import TurboCodeSpec
from waterfall.models.frames import LlrFrame
from waterfall.services.trellis import build_trellis, encode_with_state, log_map
from waterfall.utils.errors import LengthMismatch


def make_interleaver(length: int, seed: int) -> List[int]:
    """Uniformly random permutation of 0..length-1 (seeded Fisher-Yates)"""
    if length < 1:
        raise ValueError("interleaver length must be at least 1")
    return np.random.default_rng(seed).permutation(length).tolist()


def turbo_encode(bits, spec: TurboCodeSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    single = np.ndim(bits) == 1
    bits = np.atleast_2d(np.asarray(bits, dtype=np.int8))
    perm = np.asarray(spec.interleaver)
    if bits.shape[-1] != perm.size:
        raise LengthMismatch(f"{bits.shape[-1]} bits for an interleaver of length {perm.size}")

    trellis = build_trellis(spec.constituent)
    systematic, parity1, _ = encode_with_state(bits, trellis, terminate=True)
    _, parity2, _ = encode_with_state(bits[:, perm], trellis, terminate=False)
    if single:
        return systematic[0], parity1[0], parity2[0]
    return systematic, parity1, parity2


def turbo_codeword(bits, spec: TurboCodeSpec) -> np.ndarray:
    systematic, parity1, parity2 = turbo_encode(np.atleast_2d(bits), spec)
    return np.concatenate([systematic, parity1, parity2], axis=-1)


def turbo_decode(llrs: LlrFrame, spec: TurboCodeSpec) -> np.ndarray:
    """Hard decisions on the information bits after `spec.iterations` iterations"""
    single = np.ndim(llrs) == 1
    llrs = np.atleast_2d(np.asarray(llrs, dtype=float))
    perm = np.asarray(spec.interleaver)
    L = perm.size
    m = spec.constituent.memory
    if llrs.shape[-1] != 3 * L + 2 * m:
        raise LengthMismatch(
            f"{llrs.shape[-1]} LLRs for a turbo codeword of length {3 * L + 2 * m}"
        )

    trellis = build_trellis(spec.constituent)
    systematic = llrs[:, : L + m]
    parity1 = llrs[:, L + m : 2 * (L + m)]
    parity2 = llrs[:, 2 * (L + m) :]
    systematic2 = systematic[:, :L][:, perm]

    apriori1 = np.zeros((llrs.shape[0], L))
    for iteration in range(spec.iterations):
        first = log_map(trellis, systematic, parity1, apriori1, terminated=True)
        second = log_map(trellis, systematic2, parity2, first.extrinsic[:, perm], terminated=False)
        apriori1 = np.empty_like(apriori1)
        apriori1[:, perm] = second.extrinsic

    aposteriori = np.empty_like(apriori1)
    aposteriori[:, perm] = second.aposteriori
    decoded = (aposteriori < 0.0).astype(np.int8)
    return decoded[0] if single else decoded

"""
RSC Trellis Module
Encoder, soft-input Viterbi and exact log-MAP (BCJR) decoding for a
recursive systematic convolutional code (1, f/g).

Decoders accept one frame (n,) or a batch (frames, n). Codeword LLRs are
interleaved [s0, p0, s1, p1, ...]; LLR > 0 favours bit 0.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Tuple

import numpy as np

from waterfall.models.codes import ConvCodeSpec
from waterfall.models.frames import LlrFrame
from waterfall.utils.errors import LengthMismatch


@dataclass(frozen=True)
class Trellis:
    """
    State s holds (a[k-1], ..., a[k-m]) with a[k-1] in the top bit, a being
    the feedback register input. Branch b = 2*s + u.
    """

    memory: int
    next_state: np.ndarray  # (S, 2)
    parity: np.ndarray  # (S, 2)
    tail_input: np.ndarray  # (S,) input that feeds a zero into the register
    branch_from: np.ndarray  # (2S,)
    branch_to: np.ndarray  # (2S,)
    branch_input: np.ndarray  # (2S,)
    branch_parity: np.ndarray  # (2S,)
    branch_terminates: np.ndarray  # (2S,) bool, register input is zero
    entering: np.ndarray  # (S, 2) branches into each state, lower from-state first

    @property
    def num_states(self) -> int:
        return 1 << self.memory


def _taps(generator: int, memory: int) -> Tuple[int, ...]:
    """Coefficients of D^0 .. D^m (MSB of the generator is D^0)"""
    return tuple((generator >> (memory - i)) & 1 for i in range(memory + 1))


@lru_cache(maxsize=32)
def _build(feedforward: int, feedback: int, memory: int) -> Trellis:
    S = 1 << memory
    ff = _taps(feedforward, memory)
    fb = _taps(feedback, memory)

    next_state = np.zeros((S, 2), dtype=np.int64)
    parity = np.zeros((S, 2), dtype=np.int8)
    tail_input = np.zeros(S, dtype=np.int8)
    for s in range(S):
        regs = [(s >> (memory - i)) & 1 for i in range(1, memory + 1)]
        feedback_sum = 0
        for i in range(1, memory + 1):
            feedback_sum ^= fb[i] & regs[i - 1]
        tail_input[s] = feedback_sum
        for u in (0, 1):
            a = u ^ feedback_sum
            p = ff[0] & a
            for i in range(1, memory + 1):
                p ^= ff[i] & regs[i - 1]
            parity[s, u] = p
            next_state[s, u] = (a << (memory - 1)) | (s >> 1)

    branch_from = np.repeat(np.arange(S), 2)
    branch_input = np.tile(np.array([0, 1], dtype=np.int8), S)
    branch_to = next_state.reshape(-1)
    branch_parity = parity.reshape(-1)
    branch_terminates = (branch_to >> (memory - 1)) == 0

    entering = np.zeros((S, 2), dtype=np.int64)
    for ns in range(S):
        into = sorted(np.flatnonzero(branch_to == ns), key=lambda b: branch_from[b])
        entering[ns] = into

    return Trellis(
        memory=memory,
        next_state=next_state,
        parity=parity,
        tail_input=tail_input,
        branch_from=branch_from,
        branch_to=branch_to,
        branch_input=branch_input,
        branch_parity=branch_parity,
        branch_terminates=branch_terminates,
        entering=entering,
    )


def build_trellis(spec: ConvCodeSpec) -> Trellis:
    return _build(spec.feedforward, spec.feedback, spec.memory)


def encode_with_state(
    bits, trellis: Trellis, terminate: bool
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run the encoder from the zero state; returns (systematic, parity, final state)"""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.int8))
    frames, L = bits.shape
    tail = trellis.memory if terminate else 0
    systematic = np.zeros((frames, L + tail), dtype=np.int8)
    parity = np.zeros((frames, L + tail), dtype=np.int8)
    state = np.zeros(frames, dtype=np.int64)

    systematic[:, :L] = bits
    for k in range(L):
        u = bits[:, k]
        parity[:, k] = trellis.parity[state, u]
        state = trellis.next_state[state, u]
    for k in range(L, L + tail):
        u = trellis.tail_input[state]
        systematic[:, k] = u
        parity[:, k] = trellis.parity[state, u]
        state = trellis.next_state[state, u]
    return systematic, parity, state


def rsc_encode(bits, spec: ConvCodeSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Systematic and parity streams, each L (+ memory tail bits if terminated)"""
    single = np.ndim(bits) == 1
    systematic, parity, _ = encode_with_state(bits, build_trellis(spec), spec.terminated)
    if single:
        return systematic[0], parity[0]
    return systematic, parity


def interleave_streams(systematic: np.ndarray, parity: np.ndarray) -> np.ndarray:
    """[s0, p0, s1, p1, ...] along the last axis"""
    out = np.empty(systematic.shape[:-1] + (2 * systematic.shape[-1],), dtype=np.result_type(systematic, parity))
    out[..., 0::2] = systematic
    out[..., 1::2] = parity
    return out


def _split_codeword(llrs: LlrFrame, memory: int, terminated: bool) -> Tuple[np.ndarray, np.ndarray, int]:
    llrs = np.atleast_2d(np.asarray(llrs, dtype=float))
    n = llrs.shape[-1]
    tail = memory if terminated else 0
    if n % 2 or n // 2 - tail < 1:
        raise LengthMismatch(
            f"{n} LLRs do not form a {'terminated' if terminated else 'open'} "
            f"rate-1/2 codeword with memory {memory}"
        )
    return llrs[:, 0::2], llrs[:, 1::2], n // 2 - tail


def _branch_metrics(trellis: Trellis, systematic: np.ndarray, parity: np.ndarray) -> np.ndarray:
    """Correlation sum llr * (1 - 2c) per branch, shape (frames, T, 2S)"""
    u_sign = 1.0 - 2.0 * trellis.branch_input
    p_sign = 1.0 - 2.0 * trellis.branch_parity
    return systematic[:, :, None] * u_sign + parity[:, :, None] * p_sign


def viterbi_decode(llrs: LlrFrame, spec: ConvCodeSpec) -> np.ndarray:
    """
    Maximum-likelihood information sequence under the correlation metric.

    Ties between the two survivors entering a state go to the lower
    predecessor state index; an open trellis ends in the lowest-index best
    state.
    """
    single = np.ndim(llrs) == 1
    trellis = build_trellis(spec)
    systematic, parity, L = _split_codeword(llrs, spec.memory, spec.terminated)
    frames, T = systematic.shape
    S = trellis.num_states

    metrics = _branch_metrics(trellis, systematic, parity)
    if spec.terminated:
        metrics[:, L:, ~trellis.branch_terminates] = -np.inf

    first, second = trellis.entering[:, 0], trellis.entering[:, 1]
    path = np.full((frames, S), -np.inf)
    path[:, 0] = 0.0
    decisions = np.zeros((T, frames, S), dtype=bool)
    for k in range(T):
        candidates = path[:, trellis.branch_from] + metrics[:, k, :]
        c0 = candidates[:, first]
        c1 = candidates[:, second]
        take_second = c1 > c0
        decisions[k] = take_second
        path = np.where(take_second, c1, c0)

    if spec.terminated:
        state = np.zeros(frames, dtype=np.int64)
    else:
        state = np.argmax(path, axis=1)

    rows = np.arange(frames)
    decoded = np.zeros((frames, T), dtype=np.int8)
    for k in range(T - 1, -1, -1):
        branch = np.where(decisions[k, rows, state], second[state], first[state])
        decoded[:, k] = trellis.branch_input[branch]
        state = trellis.branch_from[branch]

    decoded = decoded[:, :L]
    return decoded[0] if single else decoded


class SoftOutput(NamedTuple):
    aposteriori: np.ndarray
    extrinsic: np.ndarray


def log_map(
    trellis: Trellis,
    systematic: np.ndarray,
    parity: np.ndarray,
    apriori: np.ndarray,
    terminated: bool,
) -> SoftOutput:
    """
    Forward/backward recursion with max*(a, b) = max(a, b) + ln(1 + e^-|a-b|),
    i.e. numpy.logaddexp. Arrays are batched (frames, T); apriori is
    (frames, L) and covers the information bits only.
    """
    frames, T = systematic.shape
    L = apriori.shape[1]
    S = trellis.num_states

    channel_apriori = systematic.copy()
    channel_apriori[:, :L] += apriori
    gamma = 0.5 * _branch_metrics(trellis, channel_apriori, parity)
    if terminated:
        gamma[:, L:, ~trellis.branch_terminates] = -np.inf

    first, second = trellis.entering[:, 0], trellis.entering[:, 1]

    alpha = np.empty((T + 1, frames, S))
    alpha[0] = -np.inf
    alpha[0, :, 0] = 0.0
    for k in range(T):
        m = alpha[k][:, trellis.branch_from] + gamma[:, k, :]
        a = np.logaddexp(m[:, first], m[:, second])
        alpha[k + 1] = a - a.max(axis=1, keepdims=True)

    beta = np.empty((T + 1, frames, S))
    if terminated:
        beta[T] = -np.inf
        beta[T, :, 0] = 0.0
    else:
        beta[T] = 0.0
    for k in range(T - 1, -1, -1):
        m = beta[k + 1][:, trellis.branch_to] + gamma[:, k, :]
        b = np.logaddexp(m[:, 0::2], m[:, 1::2])
        beta[k] = b - b.max(axis=1, keepdims=True)

    joint = (
        alpha[:L][:, :, trellis.branch_from]
        + np.swapaxes(gamma[:, :L, :], 0, 1)
        + beta[1 : L + 1][:, :, trellis.branch_to]
    )
    zero = np.logaddexp.reduce(joint[..., 0::2], axis=-1)
    one = np.logaddexp.reduce(joint[..., 1::2], axis=-1)
    aposteriori = (zero - one).T
    extrinsic = aposteriori - apriori - systematic[:, :L]
    return SoftOutput(aposteriori=aposteriori, extrinsic=extrinsic)


def bcjr_decode(llrs: LlrFrame, apriori, spec: ConvCodeSpec) -> SoftOutput:
    """A-posteriori and extrinsic LLRs of the L information bits"""
    single = np.ndim(llrs) == 1
    trellis = build_trellis(spec)
    systematic, parity, L = _split_codeword(llrs, spec.memory, spec.terminated)
    apriori = np.atleast_2d(np.asarray(apriori, dtype=float))
    if apriori.shape[-1] != L:
        raise LengthMismatch(f"{apriori.shape[-1]} a-priori values for {L} information bits")
    apriori = np.broadcast_to(apriori, (systematic.shape[0], L))
    out = log_map(trellis, systematic, parity, apriori, spec.terminated)
    if single:
        return SoftOutput(out.aposteriori[0], out.extrinsic[0])
    return out

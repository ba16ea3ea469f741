import numpy as np
import pytest

from waterfall.models.codes import DEFAULT_RSC, ConvCodeSpec
from waterfall.services.acceptance import brute_force_marginals, exhaustive_ml_decode
from waterfall.services.trellis import (
    bcjr_decode,
    build_trellis,
    encode_with_state,
    interleave_streams,
    rsc_encode,
    viterbi_decode,
)
from waterfall.utils.errors import LengthMismatch

OPEN_RSC = DEFAULT_RSC.model_copy(update={"terminated": False})


def noisy_llrs(bits, spec, rng, scale=2.0):
    systematic, parity = rsc_encode(bits, spec)
    symbols = 1.0 - 2.0 * interleave_streams(systematic, parity)
    return scale * (symbols + rng.standard_normal(symbols.shape))


def test_all_zero_input_gives_all_zero_codeword():
    systematic, parity = rsc_encode(np.zeros(40, dtype=np.int8), DEFAULT_RSC)
    assert not systematic.any()
    assert not parity.any()


def test_impulse_response_of_5_7_code():
    spec = ConvCodeSpec(feedforward_octal=5, feedback_octal=7, memory=2, terminated=False)
    bits = np.zeros(10, dtype=np.int8)
    bits[0] = 1
    systematic, parity = rsc_encode(bits, spec)
    assert systematic.tolist() == bits.tolist()
    assert parity.tolist() == [1, 1, 1, 0, 1, 1, 0, 1, 1, 0]


def test_encoder_is_linear(rng):
    a = rng.integers(0, 2, size=(50, 32), dtype=np.int8)
    b = rng.integers(0, 2, size=(50, 32), dtype=np.int8)
    _, pa = rsc_encode(a, OPEN_RSC)
    _, pb = rsc_encode(b, OPEN_RSC)
    _, pab = rsc_encode(a ^ b, OPEN_RSC)
    assert np.array_equal(pab, pa ^ pb)


def test_termination_returns_to_zero_state(rng):
    bits = rng.integers(0, 2, size=(1000, 20), dtype=np.int8)
    systematic, parity, state = encode_with_state(bits, build_trellis(DEFAULT_RSC), terminate=True)
    assert not state.any()
    assert systematic.shape == (1000, 23)
    assert parity.shape == (1000, 23)


def test_generators_must_fit_memory():
    with pytest.raises(ValueError):
        ConvCodeSpec(feedforward_octal=17, feedback_octal=15, memory=2)


def test_viterbi_recovers_noiseless_frames(rng):
    bits = rng.integers(0, 2, size=(20, 50), dtype=np.int8)
    systematic, parity = rsc_encode(bits, DEFAULT_RSC)
    llrs = 10.0 * (1.0 - 2.0 * interleave_streams(systematic, parity))
    assert np.array_equal(viterbi_decode(llrs, DEFAULT_RSC), bits)


def test_viterbi_single_frame_shape(rng):
    bits = rng.integers(0, 2, size=12, dtype=np.int8)
    systematic, parity = rsc_encode(bits, DEFAULT_RSC)
    llrs = 1.0 - 2.0 * interleave_streams(systematic, parity)
    decoded = viterbi_decode(llrs, DEFAULT_RSC)
    assert decoded.shape == (12,)
    assert np.array_equal(decoded, bits)


@pytest.mark.parametrize("spec", [DEFAULT_RSC, OPEN_RSC], ids=["terminated", "open"])
def test_viterbi_matches_exhaustive_search(spec, rng):
    for L in range(1, 9):
        bits = rng.integers(0, 2, size=(125, L), dtype=np.int8)
        llrs = noisy_llrs(bits, spec, rng)
        assert np.array_equal(viterbi_decode(llrs, spec), exhaustive_ml_decode(llrs, spec, L))


def test_viterbi_zero_llrs_are_deterministic():
    llrs = np.zeros(2 * (16 + 3))
    first = viterbi_decode(llrs, DEFAULT_RSC)
    assert np.array_equal(first, viterbi_decode(llrs, DEFAULT_RSC))


def test_viterbi_rejects_odd_length():
    with pytest.raises(LengthMismatch):
        viterbi_decode(np.zeros(7), DEFAULT_RSC)


def test_viterbi_rejects_codeword_shorter_than_tail():
    with pytest.raises(LengthMismatch):
        viterbi_decode(np.zeros(6), DEFAULT_RSC)


@pytest.mark.parametrize("spec", [DEFAULT_RSC, OPEN_RSC], ids=["terminated", "open"])
def test_log_map_matches_brute_force_marginals(spec, rng):
    for L in range(1, 5):
        for _ in range(50):
            bits = rng.integers(0, 2, size=L, dtype=np.int8)
            llrs = noisy_llrs(bits, spec, rng)
            apriori = rng.normal(0.0, 1.0, size=L)
            soft = bcjr_decode(llrs, apriori, spec)
            p_zero = 1.0 / (1.0 + np.exp(-soft.aposteriori))
            oracle = brute_force_marginals(llrs, apriori, spec, L)
            assert np.max(np.abs(p_zero - oracle)) <= 1e-8


def test_log_map_zero_input_gives_zero_extrinsic():
    L = 16
    soft = bcjr_decode(np.zeros(2 * (L + 3)), np.zeros(L), DEFAULT_RSC)
    assert np.allclose(soft.extrinsic, 0.0, atol=1e-9)
    assert np.allclose(soft.aposteriori, 0.0, atol=1e-9)


def test_log_map_extrinsic_excludes_own_inputs(rng):
    L = 10
    bits = rng.integers(0, 2, size=L, dtype=np.int8)
    llrs = noisy_llrs(bits, DEFAULT_RSC, rng)
    apriori = rng.normal(0.0, 1.0, size=L)
    soft = bcjr_decode(llrs, apriori, DEFAULT_RSC)
    assert np.allclose(soft.extrinsic, soft.aposteriori - apriori - llrs[0::2][:L])


def test_log_map_saturated_inputs_agree_with_bits(rng):
    bits = rng.integers(0, 2, size=30, dtype=np.int8)
    systematic, parity = rsc_encode(bits, DEFAULT_RSC)
    llrs = 30.0 * (1.0 - 2.0 * interleave_streams(systematic, parity))
    soft = bcjr_decode(llrs, np.zeros(30), DEFAULT_RSC)
    assert np.array_equal((soft.aposteriori < 0.0).astype(np.int8), bits)


def test_log_map_rejects_wrong_apriori_length():
    with pytest.raises(LengthMismatch):
        bcjr_decode(np.zeros(2 * (8 + 3)), np.zeros(7), DEFAULT_RSC)

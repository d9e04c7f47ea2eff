import numpy as np
import numpy.testing as npt
import pytest

from uwofdm.fec import (
    OuterCodeSpec,
    codedLength,
    payloadBits,
    encode,
    viterbiDecode,
    interleaverPermutation,
    interleave,
    deinterleave,
    mapQAM,
    softDemap,
    hardDecision,
)


def bitsToLLRs(bits, reliability=4.0):
    return reliability*(1.0-2.0*np.asarray(bits, dtype=float))


class TestOuterCode:
    def test_spec_validation(self):
        assert OuterCodeSpec().tailBits == 6
        assert OuterCodeSpec(rate="3/4").rateValue == 0.75
        with pytest.raises(ValueError):
            OuterCodeSpec(rate="2/3")
        with pytest.raises(ValueError):
            OuterCodeSpec(generators=(0o133,))
        with pytest.raises(ValueError):
            OuterCodeSpec(constraintLength=3)

    def test_impulse_response(self):
        coded = encode(np.array([1]))
        # A: 133 octal = 1011011, B: 171 octal = 1111001
        npt.assert_array_equal(coded[0::2], [1, 0, 1, 1, 0, 1, 1])
        npt.assert_array_equal(coded[1::2], [1, 1, 1, 1, 0, 0, 1])

    def test_linearity(self, rng):
        first = rng.integers(0, 2, 40)
        second = rng.integers(0, 2, 40)
        npt.assert_array_equal(encode(first ^ second), encode(first) ^ encode(second))

    @pytest.mark.parametrize("rate", ["1/2", "3/4"])
    def test_lengths(self, rate):
        spec = OuterCodeSpec(rate=rate)
        for numInfoBits in [0, 1, 17, 90]:
            assert encode(np.zeros(numInfoBits, dtype=int), spec).size == codedLength(numInfoBits, spec)
        assert codedLength(10, OuterCodeSpec()) == 32
        capacity = 192
        payload = payloadBits(capacity, spec)
        assert codedLength(payload, spec) <= capacity
        assert codedLength(payload+1, spec) > capacity

    def test_rejects_non_bits(self):
        with pytest.raises(ValueError):
            encode(np.array([0, 2, 1]))

    @pytest.mark.parametrize("rate", ["1/2", "3/4"])
    def test_noiseless_decoding(self, rate, rng):
        spec = OuterCodeSpec(rate=rate)
        bits = rng.integers(0, 2, 300)
        npt.assert_array_equal(viterbiDecode(bitsToLLRs(encode(bits, spec)), spec), bits)

    def test_corrects_isolated_errors(self, rng):
        bits = rng.integers(0, 2, 200)
        llrs = bitsToLLRs(encode(bits))
        llrs[[20, 100, 250, 370]] *= -1
        npt.assert_array_equal(viterbiDecode(llrs), bits)

    def test_soft_information_is_used(self, rng):
        bits = rng.integers(0, 2, 200)
        llrs = bitsToLLRs(encode(bits))
        # a burst of weak wrong decisions next to reliable correct ones
        llrs[50:56] *= -0.1
        npt.assert_array_equal(viterbiDecode(llrs), bits)

    def test_erasures_from_puncturing(self, rng):
        spec = OuterCodeSpec(rate="3/4")
        bits = rng.integers(0, 2, 120)
        llrs = bitsToLLRs(encode(bits, spec))
        llrs[[10, 80]] = 0.0
        npt.assert_array_equal(viterbiDecode(llrs, spec), bits)

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            viterbiDecode(np.ones(13))
        with pytest.raises(ValueError):
            viterbiDecode(np.ones(4))


class TestInterleaver:
    def test_first_permutation_matches_block_layout(self):
        permutation = interleaverPermutation(48, bitsPerSymbol=1)
        assert permutation[1] == 3
        assert permutation[16] == 1
        npt.assert_array_equal(np.sort(permutation), np.arange(48))

    @pytest.mark.parametrize("blockSize, bitsPerSymbol", [(96, 2), (72, 2), (192, 4), (144, 4)])
    def test_is_permutation(self, blockSize, bitsPerSymbol):
        npt.assert_array_equal(np.sort(interleaverPermutation(blockSize, bitsPerSymbol)), np.arange(blockSize))

    def test_adjacent_bits_are_spread(self):
        assert np.min(np.abs(np.diff(interleaverPermutation(96, 2)))) >= 6
        assert np.min(np.abs(np.diff(interleaverPermutation(192, 4)))) >= 10

    def test_qam_bits_alternate_reliability(self):
        permutation = interleaverPermutation(192, 4)
        # positions 0/1 of a real dimension are the reliable sign and the weaker magnitude bit
        significance = (permutation % 2)[:32]
        assert 0 < np.sum(significance) < 32

    def test_inverse(self, rng):
        bits = rng.integers(0, 2, 3*72)
        interleaved = interleave(bits, 72, 2)
        assert not np.array_equal(interleaved, bits)
        npt.assert_array_equal(deinterleave(interleaved, 72, 2), bits)

    def test_block_size_checks(self):
        with pytest.raises(ValueError):
            interleave(np.zeros(100), 72)
        with pytest.raises(ValueError):
            interleaverPermutation(72, 2, columns=7)


class TestMapping:
    @pytest.mark.parametrize("scheme, bitsPerSymbol", [("qpsk", 2), ("16qam", 4)])
    def test_unit_energy_constellation(self, scheme, bitsPerSymbol):
        labels = np.array([[(value >> (bitsPerSymbol-1-bit)) & 1 for bit in range(bitsPerSymbol)] for value in range(2**bitsPerSymbol)])
        symbols = mapQAM(labels.ravel(), scheme, sigmaD2=2.0)
        npt.assert_allclose(np.mean(np.abs(symbols)**2), 2.0)
        assert len(np.unique(np.round(symbols, 12))) == 2**bitsPerSymbol

    def test_gray_neighbours(self):
        levels = mapQAM(np.array([0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0]), "16qam", 10.0).real
        npt.assert_allclose(levels, [1, 3, -1, -3])

    @pytest.mark.parametrize("scheme", ["qpsk", "16qam"])
    def test_noiseless_demapping(self, scheme, rng):
        bits = rng.integers(0, 2, 400)
        symbols = mapQAM(bits, scheme)
        llrs = softDemap(symbols, np.full(symbols.size, 0.1), scheme)
        npt.assert_array_equal(hardDecision(llrs), bits)

    def test_llr_sign_and_scale(self):
        symbols = np.array([1.0+1.0j])/np.sqrt(2)
        llrs = softDemap(symbols, np.array([0.5]), "qpsk")
        # per dimension: 4 a / Cee with a = 1/sqrt(2)
        npt.assert_allclose(llrs, 4*(1/np.sqrt(2))**2/0.5)
        assert np.all(llrs > 0)

    def test_infinite_variance_erases(self):
        symbols = mapQAM(np.array([0, 1, 1, 0]), "qpsk")
        llrs = softDemap(symbols, np.array([np.inf, 0.1]), "qpsk")
        npt.assert_array_equal(llrs[:2], 0.0)
        assert np.all(llrs[2:] != 0)

    def test_zero_variance_is_floored(self):
        llrs = softDemap(mapQAM(np.array([0, 1]), "qpsk"), np.zeros(1), "qpsk")
        assert np.all(np.isfinite(llrs))

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            mapQAM(np.zeros(6), "64qam")
        with pytest.raises(ValueError):
            mapQAM(np.zeros(3), "16qam")

    def test_llrs_double_when_variance_halves(self, rng):
        dHat = rng.standard_normal(200)+1j*rng.standard_normal(200)
        variance = rng.uniform(0.1, 1.0, 200)
        for scheme in ["qpsk", "16qam"]:
            llrs = softDemap(dHat, variance, scheme)
            sharper = softDemap(dHat, variance/2, scheme)
            npt.assert_allclose(sharper, 2*llrs)
            npt.assert_array_equal(np.sign(sharper), np.sign(llrs))

    def test_decision_boundaries_give_zero(self):
        qpsk = softDemap(np.array([0.0+0.4j]), np.array([0.3]), "qpsk")
        assert qpsk[0] == 0.0
        assert qpsk[1] > 0
        # 16QAM magnitude bit boundary at twice the inner level
        a = np.sqrt(1/10)
        qam = softDemap(np.array([2*a+0.0j]), np.array([0.3]), "16qam")
        npt.assert_allclose(qam[1], 0.0, atol=1e-12)
        assert qam[2] == 0.0

    def test_16qam_matches_exhaustive_search(self):
        labels = np.array([[(value >> (3-bit)) & 1 for bit in range(4)] for value in range(16)])
        points = mapQAM(labels.ravel(), "16qam")
        grid = np.linspace(-1.3, 1.3, 15)
        dHat = (grid[:, None]+1j*grid[None, :]).ravel()
        variance = 0.2
        llrs = softDemap(dHat, np.full(dHat.size, variance), "16qam").reshape(-1, 4)
        distances = np.abs(dHat[:, None]-points[None, :])**2
        for bit in range(4):
            expected = (np.min(distances[:, labels[:, bit] == 1], axis=1)-np.min(distances[:, labels[:, bit] == 0], axis=1))/variance
            npt.assert_allclose(llrs[:, bit], expected, atol=1e-10)


class TestChain:
    @pytest.mark.parametrize("rate", ["1/2", "3/4"])
    @pytest.mark.parametrize("scheme, bitsPerSymbol", [("qpsk", 2), ("16qam", 4)])
    def test_noiseless_round_trip(self, rate, scheme, bitsPerSymbol, rng):
        spec = OuterCodeSpec(rate=rate)
        blockSize = 36*bitsPerSymbol
        capacity = 4*blockSize
        for _ in range(100):
            payload = rng.integers(0, 2, payloadBits(capacity, spec))
            coded = encode(payload, spec)
            padded = np.concatenate([coded, np.zeros(capacity-coded.size, dtype=coded.dtype)])
            symbols = mapQAM(interleave(padded, blockSize, bitsPerSymbol), scheme)
            llrs = deinterleave(softDemap(symbols, np.full(symbols.size, 0.05), scheme), blockSize, bitsPerSymbol)
            npt.assert_array_equal(viterbiDecode(llrs[:coded.size], spec), payload)


@pytest.mark.slow
def test_rate_half_awgn_ber():
    # QPSK carries one information bit per dimension at rate 1/2, so Es/N0 equals Eb/N0
    ebn0 = 10**(4.0/10)
    spec = OuterCodeSpec(rate="1/2")
    generator = np.random.default_rng(7)
    errors = 0
    sent = 0
    for _ in range(100):
        payload = generator.integers(0, 2, 10000)
        symbols = mapQAM(encode(payload, spec), "qpsk")
        noise = np.sqrt(1/(2*ebn0))*(generator.standard_normal(symbols.size)+1j*generator.standard_normal(symbols.size))
        llrs = softDemap(symbols+noise, np.full(symbols.size, 1/ebn0), "qpsk")
        errors += np.count_nonzero(viterbiDecode(llrs, spec) != payload)
        sent += payload.size
    assert sent >= 1000000
    assert errors/sent <= 3e-3

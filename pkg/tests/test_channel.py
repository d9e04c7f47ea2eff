import numpy as np
import numpy.testing as npt
import pytest

from uwofdm.channel import (
    ChannelRealization,
    NoiseSpec,
    powerDelayProfile,
    complexNoise,
    toFreq,
    genMultipath,
    genChannelCorpus,
    applyChannel,
)


def test_power_delay_profile():
    profile = powerDelayProfile(100e-9, 20e6, 16)
    npt.assert_allclose(np.sum(profile), 1.0)
    assert np.all(np.diff(profile) < 0)
    npt.assert_allclose(profile[1]/profile[0], np.exp(-0.5))
    with pytest.raises(ValueError):
        powerDelayProfile(0.0, 20e6, 16)


def test_noise_spec_validation():
    assert NoiseSpec().sigmaN2 == 0.0
    with pytest.raises(ValueError):
        NoiseSpec(-1.0)


def test_complex_noise_variance(rng):
    samples = complexNoise(200000, 0.5, rng)
    npt.assert_allclose(np.mean(np.abs(samples)**2), 0.5, rtol=0.02)
    npt.assert_allclose(np.var(samples.real), 0.25, rtol=0.02)


class TestMultipath:
    def test_reproducible_and_normalized(self, tableConfig):
        first = genMultipath(7, tableConfig)
        second = genMultipath(7, tableConfig)
        npt.assert_array_equal(first.h, second.h)
        assert first.h.size == tableConfig.Nu
        npt.assert_allclose(np.linalg.norm(first.h), 1.0)
        npt.assert_allclose(first.Hd, np.fft.fft(first.h, 64)[tableConfig.occupiedIndices])

    def test_different_seeds_differ(self, tableConfig):
        assert not np.allclose(genMultipath(1, tableConfig).h, genMultipath(2, tableConfig).h)

    def test_tap_limits(self, tableConfig):
        assert genMultipath(0, tableConfig, maxTaps=4).h.size == 4
        with pytest.raises(ValueError):
            genMultipath(0, tableConfig, maxTaps=tableConfig.Nu+1)

    def test_average_profile(self, tableConfig):
        powers = np.mean([np.abs(genMultipath(seed, tableConfig, normalize=False).h)**2 for seed in range(4000)], axis=0)
        npt.assert_allclose(powers[:4], powerDelayProfile(100e-9, tableConfig.fs, tableConfig.Nu)[:4], rtol=0.1)

    def test_to_freq_accepts_taps(self, smallConfig):
        npt.assert_allclose(toFreq(np.array([1.0, 0.0]), smallConfig), np.ones(smallConfig.Na))
        with pytest.raises(ValueError):
            toFreq(np.ones(smallConfig.N+1), smallConfig)


class TestCorpus:
    def test_prefix_property(self, tableConfig):
        large = genChannelCorpus(10, tableConfig, seed=3)
        small = genChannelCorpus(4, tableConfig, seed=3)
        npt.assert_array_equal(large.taps[:4], small.taps)
        npt.assert_array_equal(large.head(4).taps, small.taps)
        assert large.head(4).corpusId == small.corpusId

    def test_identity(self, tableConfig):
        corpus = genChannelCorpus(5, tableConfig, seed=9)
        assert len(corpus) == 5
        assert corpus.corpusId.startswith("5-9-")
        assert corpus.corpusId != genChannelCorpus(5, tableConfig, seed=10).corpusId
        with pytest.raises(ValueError):
            corpus.head(6)

    def test_realization(self, tableConfig, smallConfig):
        corpus = genChannelCorpus(3, smallConfig, seed=1)
        realization = corpus.realization(2, smallConfig)
        npt.assert_array_equal(realization.h, corpus.taps[2])
        npt.assert_allclose(realization.Hd, toFreq(corpus.taps[2], smallConfig))


class TestApplyChannel:
    def test_cyclic_convolution(self, rng):
        x = rng.standard_normal((3, 16))+1j*rng.standard_normal((3, 16))
        npt.assert_allclose(applyChannel(x, np.array([0.0, 1.0])), np.roll(x, 1, axis=-1), atol=1e-12)
        h = rng.standard_normal(4)+1j*rng.standard_normal(4)
        expected = np.array([np.sum([h[m]*x[0, (n-m) % 16] for m in range(4)]) for n in range(16)])
        npt.assert_allclose(applyChannel(x[0], h), expected, atol=1e-12)

    def test_frequency_domain_is_diagonal(self, smallConfig, rng):
        channel = genMultipath(4, smallConfig)
        x = rng.standard_normal(smallConfig.N)+0j
        y = applyChannel(x, channel)
        npt.assert_allclose(np.fft.fft(y)[smallConfig.occupiedIndices], channel.Hd*np.fft.fft(x)[smallConfig.occupiedIndices], atol=1e-12)

    def test_noise_is_seeded(self, rng):
        x = np.zeros(64, dtype=complex)
        noise = NoiseSpec(1.0)
        npt.assert_array_equal(applyChannel(x, np.ones(1), noise, seed=4), applyChannel(x, np.ones(1), noise, seed=4))
        assert np.all(applyChannel(x, np.ones(1)) == 0)

    def test_rejects_long_channel(self):
        channel = ChannelRealization(h=np.ones(5, dtype=complex), Hd=np.ones(12, dtype=complex), Nu=4)
        with pytest.raises(ValueError):
            applyChannel(np.zeros(16), channel)

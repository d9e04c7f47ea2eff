import io
import json
import numpy as np
import numpy.testing as npt
import pytest

from uwofdm.ofdmcore import SystemConfig
from uwofdm.codegen import systematicGenerator, buildGFromA, scfdeGenerator
from uwofdm.channel import genChannelCorpus
from uwofdm.utilities import (
    k_GeneratorHeader,
    saveGenerator,
    loadGenerator,
    saveChannelCorpus,
    loadChannelCorpus,
    loadSystemConfig,
    saveSystemConfig,
    saveTrace,
)


class TestGeneratorFiles:
    def test_bit_exact_reload(self, tableConfig, tmp_path):
        generator = systematicGenerator(tableConfig)
        path = tmp_path/"systematic.txt"
        saveGenerator(generator, path)
        loaded = loadGenerator(path)
        npt.assert_array_equal(loaded.mat, generator.mat)
        assert loaded.kind == "systematic"
        assert loaded.config == tableConfig
        assert loaded.s2 is None
        assert loaded.A is None

    def test_header(self, tableConfig):
        handle = io.StringIO()
        saveGenerator(systematicGenerator(tableConfig), handle)
        lines = handle.getvalue().splitlines()
        assert lines[0] == k_GeneratorHeader
        assert "Nd 36" in lines
        assert "Nr 16" in lines
        assert "zero_idx 0,27,28,29,30,31,32,33,34,35,36,37" in lines
        assert lines[lines.index("data")+1].count(" ") == 2*tableConfig.Nd-1

    def test_parameters_and_empty_zero_set(self, smallConfig, rng, tmp_path):
        generator = buildGFromA(rng.standard_normal((smallConfig.Na, smallConfig.Na)), smallConfig)
        handle = io.StringIO()
        saveGenerator(generator, handle)
        handle.seek(0)
        loaded = loadGenerator(handle)
        npt.assert_array_equal(loaded.A, generator.A)
        npt.assert_array_equal(loaded.mat, generator.mat)

        scfde = scfdeGenerator(16, 4)
        path = tmp_path/"scfde.txt"
        saveGenerator(scfde, path)
        loaded = loadGenerator(path)
        assert loaded.config.zeroIndices == ()
        assert loaded.s2 == 16.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            loadGenerator(tmp_path/"missing.txt")

    def test_bad_header(self):
        with pytest.raises(ValueError):
            loadGenerator(io.StringIO("something else\n"))


class TestCorpusFiles:
    def test_reload(self, tableConfig, tmp_path):
        corpus = genChannelCorpus(6, tableConfig, seed=2)
        path = tmp_path/"channels.txt"
        saveChannelCorpus(corpus, path)
        loaded = loadChannelCorpus(path)
        npt.assert_array_equal(loaded.taps, corpus.taps)
        assert loaded.corpusId == corpus.corpusId
        assert loaded.delaySpread == corpus.delaySpread
        assert loaded.Nu == tableConfig.Nu

    def test_truncated_file(self, tableConfig, tmp_path):
        path = tmp_path/"channels.txt"
        saveChannelCorpus(genChannelCorpus(3, tableConfig), path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1])+"\n")
        with pytest.raises(ValueError):
            loadChannelCorpus(path)


class TestConfigFiles:
    def test_partial_config(self, tmp_path):
        path = tmp_path/"config.json"
        path.write_text(json.dumps({"sigmaD2": 2.0}))
        config = loadSystemConfig(path)
        assert config.sigmaD2 == 2.0
        assert config.N == 64

    def test_save_and_load(self, smallConfig, tmp_path):
        path = tmp_path/"config.json"
        saveSystemConfig(smallConfig, path)
        assert loadSystemConfig(path) == smallConfig

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            loadSystemConfig(io.StringIO('{"Nfft": 64}'))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            loadSystemConfig(tmp_path/"config.json")


def test_trace(tmp_path):
    path = tmp_path/"trace.txt"
    trace = np.array([3.0, 2.5, 1.0/3.0])
    saveTrace(trace, path)
    npt.assert_array_equal(np.loadtxt(path), trace)


def test_config_is_hashable_value():
    assert SystemConfig() == SystemConfig()

from dataclasses import replace
import warnings
import numpy as np
import pytest

from uwofdm.ofdmcore import SystemConfig, UWOFDMDiagnosticWarning
from uwofdm.codegen import CostSpec, DescentOptions, systematicGenerator, polishGenerator, normalizeGenerator, steepestDescent


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the desk-scale acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skipSlow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skipSlow)


@pytest.fixture(scope="session")
def tableConfig():
    return SystemConfig()


@pytest.fixture(scope="session")
def smallConfig():
    # conjugate-symmetric 16 point layout, 8 data and 4 redundant subcarriers
    return SystemConfig(N=16, Nu=4, zeroIndices=(0, 7, 8, 9), redundantIndices=(2, 5, 11, 14))


@pytest.fixture(scope="session")
def optimumGenerator(tableConfig):
    """Normalized exact optimum of the default layout (polished systematic code)."""
    return replace(normalizeGenerator(polishGenerator(systematicGenerator(tableConfig))), kind="optlmmse")


@pytest.fixture(scope="session")
def randomOptimumGenerator(tableConfig):
    """Normalized optimum reached from a random start (no symmetry, full parameter matrix)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UWOFDMDiagnosticWarning)
        result = steepestDescent(CostSpec(estimator="lmmse"), tableConfig, init="random", seed=7, options=DescentOptions(maxIterations=2))
    return result.generator


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

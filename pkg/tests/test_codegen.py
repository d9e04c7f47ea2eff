from dataclasses import replace
import numpy as np
import numpy.testing as npt
import pytest

from uwofdm.ofdmcore import ConfigurationError, UWOFDMDiagnosticWarning, meanSymbolEnergy
from uwofdm.codegen import (
    GeneratorMatrix,
    CostSpec,
    DescentOptions,
    InfeasibleParametrizationError,
    k_DefaultRedundantIndices,
    closedFormMinimum,
    costBLUE,
    costLMMSE,
    costFromSingularValues,
    costGradientFromSingularValues,
    systematicT,
    systematicGenerator,
    redundantEnergyCost,
    optimizePermutation,
    buildGFromA,
    numericGradient,
    steepestDescent,
    normalizeGenerator,
    polishGenerator,
    certifyOptimality,
    scfdeGenerator,
    checkSymmetry,
)


def randomComplex(rng, shape):
    return rng.standard_normal(shape)+1j*rng.standard_normal(shape)


class TestGeneratorMatrix:
    def test_shape_and_kind_are_validated(self, smallConfig):
        with pytest.raises(ValueError):
            GeneratorMatrix(mat=np.zeros((smallConfig.Na, smallConfig.Nd+1)), kind="systematic", config=smallConfig)
        with pytest.raises(ValueError):
            GeneratorMatrix(mat=np.zeros((smallConfig.Na, smallConfig.Nd)), kind="unknown", config=smallConfig)

    def test_systematic_generator(self, tableConfig):
        generator = systematicGenerator(tableConfig)
        assert generator.kind == "systematic"
        assert generator.constraintResidual < 1e-9
        npt.assert_array_equal(generator.mat[tableConfig.dataPositions], np.eye(tableConfig.Nd))
        npt.assert_allclose(generator.mat[tableConfig.redundantPositions], systematicT(tableConfig))

    def test_redundant_energy_is_the_systematic_excess(self, tableConfig):
        generator = systematicGenerator(tableConfig)
        excess = meanSymbolEnergy(generator)-tableConfig.sigmaD2*tableConfig.Nd/tableConfig.N
        npt.assert_allclose(redundantEnergyCost(systematicT(tableConfig), tableConfig), excess, rtol=1e-10)


class TestCosts:
    def test_cost_spec_validation(self):
        assert CostSpec(estimator="BLUE").estimator == "blue"
        with pytest.raises(ValueError):
            CostSpec(estimator="zf")
        with pytest.raises(ValueError):
            CostSpec(c=0.0)

    def test_singular_value_form_matches_matrix_form(self, rng):
        blue = CostSpec("blue", c=1.7, sigmaD2=1.3)
        lmmse = CostSpec("lmmse", c=0.4, sigmaD2=1.3)
        for _ in range(100):
            G = randomComplex(rng, (12, 8))
            s = np.linalg.svd(G, compute_uv=False)
            npt.assert_allclose(costFromSingularValues(s, blue), costBLUE(G, blue), rtol=1e-10)
            npt.assert_allclose(costFromSingularValues(s, lmmse), costLMMSE(G, lmmse), rtol=1e-10)

    def test_closed_form_minima(self, optimumGenerator, tableConfig):
        blue = CostSpec("blue", c=1.0)
        lmmse = CostSpec("lmmse", c=1.0)
        assert closedFormMinimum(blue, tableConfig.Nd) == 36.0
        assert closedFormMinimum(lmmse, tableConfig.Nd) == 18.0
        npt.assert_allclose(costBLUE(optimumGenerator, blue), 36.0, rtol=1e-9)
        npt.assert_allclose(costLMMSE(optimumGenerator, lmmse), 18.0, rtol=1e-9)

    def test_systematic_is_not_optimal(self, tableConfig):
        generator = systematicGenerator(tableConfig)
        assert costLMMSE(generator, CostSpec("lmmse")) > 18.0*1.01
        assert costBLUE(generator, CostSpec("blue")) > 36.0*1.01

    def test_costs_are_scale_invariant(self, rng):
        G = randomComplex(rng, (12, 8))
        spec = CostSpec("lmmse", c=2.0)
        npt.assert_allclose(costLMMSE(3.0*G, spec), costLMMSE(G, spec), rtol=1e-12)

    def test_rank_deficient_cost_raises(self, rng):
        G = randomComplex(rng, (12, 8))
        G[:, 0] = G[:, 1]
        with pytest.raises(ValueError):
            costBLUE(G, CostSpec("blue"))


class TestSingularValueStationarity:
    @pytest.mark.parametrize("estimator", ["blue", "lmmse"])
    def test_gradient_vanishes_at_equal_singular_values(self, estimator):
        spec = CostSpec(estimator, c=1.0)
        s = np.full(4, 0.7)
        assert np.linalg.norm(costGradientFromSingularValues(s, spec)) < 1e-12
        numeric = numericGradient(lambda values: costFromSingularValues(values, spec), s)
        assert np.linalg.norm(numeric) < 1e-8

    @pytest.mark.parametrize("estimator", ["blue", "lmmse"])
    def test_gradient_is_nonzero_elsewhere(self, estimator, rng):
        spec = CostSpec(estimator, c=1.0)
        for _ in range(1000):
            s = rng.uniform(0.2, 2.0, 4)
            assert np.linalg.norm(costGradientFromSingularValues(s, spec)) > 1e-8

    @pytest.mark.parametrize("estimator", ["blue", "lmmse"])
    def test_analytic_gradient_matches_finite_differences(self, estimator, rng):
        spec = CostSpec(estimator, c=0.8)
        for _ in range(10):
            s = rng.uniform(0.5, 2.0, 6)
            numeric = numericGradient(lambda values: costFromSingularValues(values, spec), s)
            npt.assert_allclose(numeric, costGradientFromSingularValues(s, spec), rtol=1e-5, atol=1e-8)


class TestNumericGradient:
    def test_quadratic(self, rng):
        A = rng.standard_normal((3, 4))
        npt.assert_allclose(numericGradient(lambda X: np.sum(X**2), A), 2*A, atol=1e-6)

    def test_batched_matches_sequential(self, rng):
        A = rng.standard_normal((5, 5))
        weights = rng.standard_normal((5, 5))

        def cost(X):
            return np.sum(weights*X**3, axis=(-2, -1))

        npt.assert_allclose(numericGradient(cost, A, batched=True, chunkSize=7), numericGradient(cost, A), rtol=1e-6, atol=1e-6)

    def test_rejects_bad_step_and_nan(self, rng):
        A = rng.standard_normal((2, 2))
        with pytest.raises(ValueError):
            numericGradient(lambda X: np.sum(X), A, epsilon=0.0)
        with pytest.raises(ValueError):
            numericGradient(lambda X: np.nan, A)


class TestParametrization:
    def test_identity_gives_systematic(self, smallConfig):
        npt.assert_allclose(buildGFromA(np.eye(smallConfig.Na), smallConfig).mat, systematicGenerator(smallConfig).mat, atol=1e-12)

    def test_random_parameters_satisfy_constraint(self, tableConfig, rng):
        for _ in range(5):
            generator = buildGFromA(rng.standard_normal((tableConfig.Na, tableConfig.Na)), tableConfig)
            assert generator.kind == "parametrized"
            assert generator.constraintResidual < 1e-9

    def test_singular_parameters_raise(self, smallConfig):
        with pytest.raises(InfeasibleParametrizationError):
            buildGFromA(np.zeros((smallConfig.Na, smallConfig.Na)), smallConfig)
        with pytest.raises(ValueError):
            buildGFromA(np.eye(smallConfig.Na+1), smallConfig)


class TestPermutation:
    def test_published_set(self, tableConfig):
        assert optimizePermutation(tableConfig) == k_DefaultRedundantIndices

    def test_published_set_needs_default_layout(self, smallConfig):
        with pytest.raises(ConfigurationError):
            optimizePermutation(smallConfig, "published")
        with pytest.raises(ValueError):
            optimizePermutation(smallConfig, "exhaustive")

    def test_local_search_never_worsens(self, smallConfig):
        start = (1, 2, 3, 4)
        startCost = redundantEnergyCost(systematicT(replace(smallConfig, redundantIndices=start)), smallConfig)
        result = optimizePermutation(smallConfig, "localsearch", seed=5, iterations=200, initial=start)
        assert len(result) == smallConfig.Nr
        candidate = replace(smallConfig, redundantIndices=result)
        assert redundantEnergyCost(systematicT(candidate), candidate) <= startCost


class TestSteepestDescent:
    @pytest.mark.filterwarnings("ignore::uwofdm.ofdmcore.UWOFDMDiagnosticWarning")
    @pytest.mark.parametrize("estimator", ["blue", "lmmse"])
    def test_small_layout_descends(self, smallConfig, estimator):
        spec = CostSpec(estimator, c=1.0)
        result = steepestDescent(spec, smallConfig, options=DescentOptions(maxIterations=20000, targetGap=1e-6, polish=False))
        assert np.all(np.diff(result.trace) < 0)
        assert result.trace[-1] < result.trace[0]
        assert result.trace[-1] >= closedFormMinimum(spec, smallConfig.Nd)*(1-1e-9)
        assert result.stopReason == "target_gap"
        assert result.rawGenerator.constraintResidual < 1e-9
        assert result.generator.kind == f"opt{estimator}"
        npt.assert_allclose(result.generator.mat, normalizeGenerator(result.rawGenerator, tolerance=None).mat)
        # the unpolished descent output itself is (nearly) alpha-orthogonal
        assert certifyOptimality(result.generator, tol=1e-2).isOptimal
        assert not certifyOptimality(systematicGenerator(smallConfig), tol=1e-2).isOptimal

    @pytest.mark.filterwarnings("ignore::uwofdm.ofdmcore.UWOFDMDiagnosticWarning")
    def test_random_start_is_reproducible(self, smallConfig):
        spec = CostSpec("lmmse")
        options = DescentOptions(maxIterations=5)
        first = steepestDescent(spec, smallConfig, init="random", seed=3, options=options)
        second = steepestDescent(spec, smallConfig, init="random", seed=3, options=options)
        npt.assert_array_equal(first.A, second.A)

    @pytest.mark.filterwarnings("ignore::uwofdm.ofdmcore.UWOFDMDiagnosticWarning")
    def test_target_gap_stops_immediately(self, smallConfig):
        spec = CostSpec("lmmse")
        result = steepestDescent(spec, smallConfig, options=DescentOptions(targetGap=1e3))
        assert result.stopReason == "target_gap"
        assert result.converged
        assert result.iterations == 0

    def test_non_convergence_warns(self, smallConfig):
        with pytest.warns(UWOFDMDiagnosticWarning):
            steepestDescent(CostSpec("blue"), smallConfig, options=DescentOptions(maxIterations=1))

    def test_invalid_init(self, smallConfig):
        with pytest.raises(ValueError):
            steepestDescent(CostSpec(), smallConfig, init="zeros")
        with pytest.raises(InfeasibleParametrizationError):
            steepestDescent(CostSpec(), smallConfig, init=np.zeros((smallConfig.Na, smallConfig.Na)))


class TestPostProcessing:
    def test_polish_reaches_exact_optimum(self, tableConfig):
        polished = polishGenerator(systematicGenerator(tableConfig))
        report = certifyOptimality(polished)
        assert report.isOptimal
        assert report.singularValueSpread < 1e-9

    def test_polish_drops_parameter_matrix(self, smallConfig, rng):
        generator = buildGFromA(np.eye(smallConfig.Na)+0.1*rng.standard_normal((smallConfig.Na, smallConfig.Na)), smallConfig)
        assert generator.A is not None
        polished = polishGenerator(generator)
        assert polished.A is None
        assert checkSymmetry(polished).aSymmetric is None
        assert certifyOptimality(polished).isOptimal

    @pytest.mark.filterwarnings("ignore::uwofdm.ofdmcore.UWOFDMDiagnosticWarning")
    def test_descent_result_keeps_parameters_on_raw_generator(self, smallConfig):
        result = steepestDescent(CostSpec("lmmse"), smallConfig, options=DescentOptions(maxIterations=3))
        assert result.generator.A is None
        npt.assert_array_equal(result.rawGenerator.A, result.A)

    def test_normalize(self, tableConfig):
        normalized = normalizeGenerator(polishGenerator(systematicGenerator(tableConfig)))
        npt.assert_allclose(np.conj(normalized.mat.T) @ normalized.mat, np.eye(tableConfig.Nd), atol=1e-9)
        assert normalized.s2 == 1.0

    def test_normalize_rejects_non_orthogonal(self, tableConfig):
        with pytest.raises(ValueError):
            normalizeGenerator(systematicGenerator(tableConfig))
        normalizeGenerator(systematicGenerator(tableConfig), tolerance=None)

    def test_certificate_fails_for_systematic(self, tableConfig):
        report = certifyOptimality(systematicGenerator(tableConfig))
        assert not report.isOptimal
        assert report.constraintResidual < 1e-9

    def test_scfde_generator(self):
        generator = scfdeGenerator(64, 16)
        gram = np.conj(generator.mat.T) @ generator.mat
        npt.assert_allclose(gram, 64*np.eye(48), atol=1e-9)
        assert generator.s2 == 64.0
        report = certifyOptimality(generator)
        assert report.isOptimal
        npt.assert_allclose(report.s2, 64.0)

    def test_scfde_needs_single_carrier_layout(self, tableConfig):
        with pytest.raises(ValueError):
            scfdeGenerator(64, 16, tableConfig)

    def test_conjugate_symmetry(self, tableConfig, smallConfig):
        for config in [tableConfig, smallConfig]:
            assert checkSymmetry(systematicGenerator(config)).gConjSymmetric
            assert checkSymmetry(polishGenerator(systematicGenerator(config))).gConjSymmetric

    def test_parameter_symmetry(self, smallConfig, rng):
        A = rng.standard_normal((smallConfig.Na, smallConfig.Na))
        report = checkSymmetry(buildGFromA(np.eye(smallConfig.Na), smallConfig))
        assert report.aSymmetric
        report = checkSymmetry(buildGFromA(A, smallConfig))
        assert not report.aSymmetric

    def test_symmetry_needs_even_dimensions(self, rng):
        with pytest.raises(ValueError):
            checkSymmetry(randomComplex(rng, (5, 4)))


@pytest.mark.filterwarnings("ignore::uwofdm.ofdmcore.UWOFDMDiagnosticWarning")
class TestStartingPoints:
    def test_random_starts_reach_different_optima(self, smallConfig):
        spec = CostSpec("lmmse", c=1.0)
        options = DescentOptions(maxIterations=20)
        first = steepestDescent(spec, smallConfig, init="random", seed=1, options=options).generator
        second = steepestDescent(spec, smallConfig, init="random", seed=2, options=options).generator
        minimum = closedFormMinimum(spec, smallConfig.Nd)
        npt.assert_allclose(costLMMSE(first, spec), minimum, rtol=1e-9)
        npt.assert_allclose(costLMMSE(second, spec), minimum, rtol=1e-9)
        assert certifyOptimality(first).isOptimal and certifyOptimality(second).isOptimal
        assert np.max(np.abs(first.mat-second.mat)) > 1e-3

    def test_identity_start_keeps_symmetry(self, smallConfig):
        result = steepestDescent(CostSpec("lmmse"), smallConfig, init="identity", options=DescentOptions(maxIterations=20))
        assert checkSymmetry(result.rawGenerator).aSymmetric
        assert checkSymmetry(result.generator).gConjSymmetric

    def test_random_start_breaks_symmetry(self, smallConfig):
        result = steepestDescent(CostSpec("lmmse"), smallConfig, init="random", seed=5, options=DescentOptions(maxIterations=20))
        assert not checkSymmetry(result.rawGenerator).aSymmetric
        assert not checkSymmetry(result.generator).gConjSymmetric

    def test_random_start_optimum_of_default_layout(self, randomOptimumGenerator, optimumGenerator):
        assert certifyOptimality(randomOptimumGenerator).isOptimal
        assert not checkSymmetry(randomOptimumGenerator).gConjSymmetric
        assert checkSymmetry(optimumGenerator).gConjSymmetric
        spec = CostSpec("lmmse", c=1.0)
        npt.assert_allclose(costLMMSE(randomOptimumGenerator, spec), costLMMSE(optimumGenerator, spec), rtol=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("estimator, minimum", [("lmmse", 18.0), ("blue", 36.0)])
def test_default_layout_reaches_closed_form_minimum(tableConfig, estimator, minimum):
    spec = CostSpec(estimator, c=1.0)
    result = steepestDescent(spec, tableConfig, options=DescentOptions(targetGap=1e-5, polish=False))
    assert abs(result.trace[-1]-minimum)/minimum < 1e-4
    normalized = normalizeGenerator(result.rawGenerator, tolerance=None)
    assert certifyOptimality(polishGenerator(normalized)).isOptimal


@pytest.mark.slow
def test_identity_start_is_an_order_of_magnitude_cheaper(tableConfig):
    spec = CostSpec("lmmse", c=1.0)
    options = DescentOptions(targetGap=1e-3)
    identity = steepestDescent(spec, tableConfig, init="identity", options=options)
    randomEvaluations = [steepestDescent(spec, tableConfig, init="random", seed=seed, options=options).costEvaluations for seed in range(3)]
    assert np.mean(randomEvaluations) >= 10*identity.costEvaluations

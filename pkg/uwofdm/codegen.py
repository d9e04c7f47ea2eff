from dataclasses import dataclass, replace
from functools import cached_property
import warnings
import numpy as np
import scipy.linalg
from tqdm.auto import tqdm

from .ofdmcore import (
    SystemConfig,
    ConfigurationError,
    UWOFDMDiagnosticWarning,
    idftMatrix,
    dftMatrix,
    zeroWordResidual,
    singleCarrierConfig,
    k_DefaultZeroIndices,
    k_DefaultRedundantIndices,
)

k_GeneratorKinds = ["systematic", "optblue", "optlmmse", "scfde", "parametrized"]
k_Estimators = ["blue", "lmmse"]
k_InitStrategies = ["identity", "random"]
k_PermutationStrategies = ["published", "localsearch"]

k_ConditionLimit = 1e12
k_RankTolerance = 1e-13


class InfeasibleParametrizationError(ValueError):
    """Raised when a parameter matrix A leads to a (nearly) singular M22 block."""


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Complex (Nd+Nr) x Nd code generator matrix with its provenance.

    Parameters
    ----------
    mat : ndarray
        The generator matrix. Rows follow the ordering of the occupied subcarriers.
    kind : str
        One of ``k_GeneratorKinds``.
    config : SystemConfig
        Layout the matrix was built for.
    s2 : float, optional
        Common squared singular value (None for non-orthogonal matrices such as the systematic one).
    A : ndarray, optional
        Real parameter matrix the generator was derived from, if any.
    """
    mat: np.ndarray
    kind: str
    config: SystemConfig
    s2: float = None
    A: np.ndarray = None

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if(self.kind not in k_GeneratorKinds):
            raise ValueError(f"kind must be one of the following: {', '.join(k_GeneratorKinds)}")
        if(mat.shape != (self.config.Na, self.config.Nd)):
            raise ValueError(f"Generator matrix must be {self.config.Na}x{self.config.Nd}, got {mat.shape}")
        object.__setattr__(self, "mat", mat)

    @cached_property
    def constraintResidual(self):
        return zeroWordResidual(self.mat, self.config)

    @property
    def Nd(self):
        return self.config.Nd


@dataclass(frozen=True)
class CostSpec:
    """Estimator and fixed energy-to-noise ratio c = Es/sigma_n^2 of a transceiver cost function."""
    estimator: str = "lmmse"
    c: float = 1.0
    sigmaD2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "estimator", self.estimator.lower())
        if(self.estimator not in k_Estimators):
            raise ValueError(f"estimator must be one of the following: {', '.join(k_Estimators)}")
        if(not self.c > 0):
            raise ValueError(f"c must be positive, got {self.c}")
        if(not self.sigmaD2 > 0):
            raise ValueError(f"sigmaD2 must be positive, got {self.sigmaD2}")


@dataclass
class DescentOptions:
    """Knobs of the steepest descent search over the parameter matrix A.

    Parameters
    ----------
    maxIterations : int
        Hard limit on the number of descent iterations.
    relativeTolerance : float
        An iteration is "stalled" when the relative cost decrease is below this value.
    patience : int
        Number of consecutive stalled iterations after which the search stops.
    targetGap : float or None
        Stop as soon as (J - Jmin)/Jmin drops below this value (Jmin is the closed-form minimum).
    initialStep, maxStep : float
        Step length (Frobenius distance in A) of the first trial and its upper bound.
        The step is doubled before each line search and halved until the cost decreases.
    maxHalvings : int
        Halvings tried before the line search gives up.
    epsilon : float or None
        Finite-difference step. None uses 1e-6 (1+|A_ij|) per entry.
    conditionLimit : float
        Steps whose M22 block has a larger condition number are rejected.
    orthoTolerance, costTolerance : float
        Postcondition tolerances checked (and reported) on the result.
    polish : bool
        Project the result onto the constraint nullspace and re-orthonormalize before normalization.
    """
    maxIterations: int = 50000
    relativeTolerance: float = 1e-10
    patience: int = 10
    targetGap: float = None
    initialStep: float = 1e-2
    maxStep: float = 1.0
    maxHalvings: int = 60
    epsilon: float = None
    conditionLimit: float = k_ConditionLimit
    orthoTolerance: float = 1e-6
    costTolerance: float = 1e-4
    polish: bool = True


@dataclass
class DescentResult:
    A: np.ndarray
    generator: GeneratorMatrix
    rawGenerator: GeneratorMatrix
    trace: np.ndarray
    iterations: int
    costEvaluations: int
    converged: bool
    stopReason: str


@dataclass
class OptimalityReport:
    orthoResidual: float
    constraintResidual: float
    singularValueSpread: float
    s2: float
    isOptimal: bool


@dataclass
class SymmetryReport:
    aSymmetric: bool
    gConjSymmetric: bool
    aResidual: float
    gResidual: float


def _generatorArray(G):
    return np.asarray(getattr(G, "mat", G))


class _Parametrization:
    """Map A -> G(A) = A P [I; T(A)] for one configuration, vectorized over stacks of A.

    The last Nu rows of F^-1 B are computed once; T(A) only needs those rows.
    """
    def __init__(self, config, conditionLimit=k_ConditionLimit):
        self.config = config
        self.conditionLimit = conditionLimit
        self.tailRows = idftMatrix(config.N)[config.N-config.Nu:, config.occupiedIndices]

    def generators(self, A):
        """Returns the generator stack and a mask of feasible (well-conditioned) entries."""
        config = self.config
        A = np.asarray(A, dtype=float)
        tail = self.tailRows @ A
        M21 = tail[..., config.dataPositions]
        M22 = tail[..., config.redundantPositions]
        with np.errstate(divide="ignore", invalid="ignore"):
            condition = np.asarray(np.linalg.cond(M22))
        feasible = np.isfinite(condition) & (condition < self.conditionLimit)
        safeM22 = np.where(feasible[..., None, None], M22, np.eye(config.Nu))
        T = -np.linalg.solve(safeM22, M21)
        Q = np.zeros(A.shape[:-2]+(config.Na, config.Nd), dtype=complex)
        Q[..., config.dataPositions, :] = np.eye(config.Nd)
        Q[..., config.redundantPositions, :] = T
        return A @ Q, feasible


def _squaredSingularValues(G):
    gram = np.swapaxes(np.conj(G), -1, -2) @ G
    return np.clip(np.linalg.eigvalsh(gram), 0.0, None)


def _costFromSquared(s2, spec, estimator):
    s2 = np.asarray(s2, dtype=float)
    Nd = s2.shape[-1]
    total = np.sum(s2, axis=-1)
    valid = np.min(s2, axis=-1) > k_RankTolerance*np.max(s2, axis=-1)
    safe = np.where(valid[..., None], s2, 1.0)
    if(estimator == "blue"):
        cost = spec.sigmaD2/(spec.c*Nd)*total*np.sum(1.0/safe, axis=-1)
    else:
        cost = spec.sigmaD2*np.sum(total[..., None]/(spec.c*Nd*safe+total[..., None]), axis=-1)
    return np.where(valid, cost, np.inf)


def _scalarCost(G, spec, estimator):
    cost = _costFromSquared(_squaredSingularValues(_generatorArray(G)), spec, estimator)
    if(not np.isfinite(cost)):
        raise ValueError("Generator matrix is rank deficient")
    return float(cost)


def closedFormMinimum(spec, Nd):
    """Global minimum sigma_d^2 Nd/c (BLUE) or sigma_d^2 Nd/(c+1) (LMMSE) of the transceiver cost."""
    if(spec.estimator == "blue"):
        return spec.sigmaD2*Nd/spec.c
    return spec.sigmaD2*Nd/(spec.c+1)


def costBLUE(G, spec):
    """Sum of BLUE error variances at fixed c: sigma_d^2/(c Nd) tr(G^H G) tr((G^H G)^-1)."""
    return _scalarCost(G, spec, "blue")


def costLMMSE(G, spec):
    """Sum of LMMSE error variances at fixed c: sigma_d^2 tr((c Nd/tr(G^H G) G^H G + I)^-1)."""
    return _scalarCost(G, spec, "lmmse")


def costFromSingularValues(s, spec):
    """Transceiver cost written as a function of the singular values of G.

    Parameters
    ----------
    s : array_like
        Singular values s_1..s_Nd, all positive.
    spec : CostSpec
        Estimator, c and sigma_d^2.

    Returns
    -------
    float
        BLUE: sigma_d^2/(c Nd) (sum s_i^2)(sum 1/s_i^2).
        LMMSE: sigma_d^2 Nd - sigma_d^2 c Nd sum s_i^2/(c Nd s_i^2 + sum s_k^2).
    """
    s = np.asarray(s, dtype=float)
    if(np.any(s <= 0)):
        raise ValueError("Singular values must be positive")
    Nd = s.size
    s2 = s**2
    total = np.sum(s2)
    if(spec.estimator == "blue"):
        return float(spec.sigmaD2/(spec.c*Nd)*total*np.sum(1.0/s2))
    a = spec.c*Nd
    return float(spec.sigmaD2*Nd-spec.sigmaD2*a*np.sum(s2/(a*s2+total)))


def costGradientFromSingularValues(s, spec):
    """Analytic gradient of ``costFromSingularValues`` with respect to s."""
    s = np.asarray(s, dtype=float)
    if(np.any(s <= 0)):
        raise ValueError("Singular values must be positive")
    Nd = s.size
    s2 = s**2
    total = np.sum(s2)
    if(spec.estimator == "blue"):
        return 2*spec.sigmaD2/(spec.c*Nd)*(s*np.sum(1.0/s2)-total/s**3)
    a = spec.c*Nd
    return -2*spec.sigmaD2*a*s*(total/(a*s2+total)**2-np.sum(s2/(a*s2+total)**2))


def systematicT(config):
    """Redundancy matrix T = -M22^-1 M21 of the systematic code.

    M = F^-1 B P is partitioned so that M21/M22 are the last Nu rows restricted
    to the data/redundant subcarriers.

    Raises
    ------
    ConfigurationError
        If M22 is singular for the configured redundant index set.
    """
    tailRows = idftMatrix(config.N)[config.N-config.Nu:, config.occupiedIndices]
    M21 = tailRows[:, config.dataPositions]
    M22 = tailRows[:, config.redundantPositions]
    condition = np.linalg.cond(M22)
    if(not np.isfinite(condition) or condition > k_ConditionLimit):
        raise ConfigurationError(f"M22 is singular (condition number {condition:.3g}) for the redundant subcarrier set {list(config.redundantIndices)}")
    return -np.linalg.solve(M22, M21)


def systematicGenerator(config):
    """Systematic generator G = P [I; T]."""
    mat = np.zeros((config.Na, config.Nd), dtype=complex)
    mat[config.dataPositions, :] = np.eye(config.Nd)
    mat[config.redundantPositions, :] = systematicT(config)
    return GeneratorMatrix(mat=mat, kind="systematic", config=config)


def redundantEnergyCost(T, config):
    """Energy cost J_E = sigma_d^2/N tr(T T^H) of the redundant subcarriers."""
    T = np.asarray(T)
    return float(config.sigmaD2/config.N*np.sum(np.abs(T)**2))


def _energyCostOfSet(config, redundantIndices):
    try:
        candidate = replace(config, redundantIndices=tuple(int(k) for k in redundantIndices))
        return redundantEnergyCost(systematicT(candidate), candidate)
    except ConfigurationError:
        return np.inf


def optimizePermutation(config, strategy="published", seed=None, iterations=10000, initial=None, showProgress=False):
    """Chooses the redundant subcarrier set (the permutation P).

    Parameters
    ----------
    config : SystemConfig
        Layout providing N, Nu and the zero subcarriers.
    strategy : str
        "published" returns the known energy-optimal set (default layout only).
        "localsearch" improves a set by random pairwise swaps between a redundant
        and a data subcarrier, accepting a swap only if J_E decreases.
    seed : int, optional
        Seed of the local search.
    iterations : int
        Number of swap trials of the local search.
    initial : iterable of int, optional
        Starting set of the local search. A random set is drawn when omitted.
    showProgress : bool
        Show a tqdm progress bar.

    Returns
    -------
    tuple of int
        Sorted redundant subcarrier indices.
    """
    strategy = strategy.lower()
    if(strategy not in k_PermutationStrategies):
        raise ValueError(f"strategy must be one of the following: {', '.join(k_PermutationStrategies)}")
    if(strategy == "published"):
        if(config.N != 64 or config.Nu != 16 or tuple(config.zeroIndices) != k_DefaultZeroIndices):
            raise ConfigurationError("The published redundant subcarrier set only applies to N=64, Nu=16 and the default zero subcarriers")
        return k_DefaultRedundantIndices

    rng = np.random.default_rng(seed)
    occupied = config.occupiedIndices
    if(initial is None):
        current = set(int(k) for k in rng.choice(occupied, size=config.Nr, replace=False))
    else:
        current = set(int(k) for k in initial)
        if(len(current) != config.Nr):
            raise ValueError(f"Initial set must contain {config.Nr} distinct indices")
    currentCost = _energyCostOfSet(config, sorted(current))

    trials = range(iterations)
    if(showProgress):
        trials = tqdm(trials, desc="Local search over redundant subcarriers", leave=False)
    for _ in trials:
        redundant = sorted(current)
        free = [int(k) for k in occupied if k not in current]
        removed = redundant[rng.integers(len(redundant))]
        added = free[rng.integers(len(free))]
        candidate = (current-{removed})|{added}
        candidateCost = _energyCostOfSet(config, sorted(candidate))
        if(candidateCost < currentCost):
            current, currentCost = candidate, candidateCost
    return tuple(sorted(current))


def buildGFromA(A, config, kind="parametrized"):
    """Generator G = A P [I; T(A)] with T(A) = -M22(A)^-1 M21(A) and M(A) = F^-1 B A P.

    The zero-UW constraint holds for every non-singular A.

    Raises
    ------
    InfeasibleParametrizationError
        If M22(A) is (nearly) singular.
    """
    A = np.asarray(A, dtype=float)
    if(A.shape != (config.Na, config.Na)):
        raise ValueError(f"A must be {config.Na}x{config.Na}, got {A.shape}")
    mat, feasible = _Parametrization(config).generators(A)
    if(not feasible):
        raise InfeasibleParametrizationError("M22 is singular for the given parameter matrix")
    return GeneratorMatrix(mat=mat, kind=kind, config=config, A=A.copy())


def numericGradient(costFunction, A, epsilon=None, batched=False, chunkSize=256):
    """Central-difference gradient (J(a+eps) - J(a-eps))/(2 eps) for every entry of A.

    Parameters
    ----------
    costFunction : callable
        Maps an array shaped like A to a scalar. With ``batched=True`` it must
        accept a stack (K,)+A.shape and return K costs.
    A : ndarray
        Point where the gradient is evaluated.
    epsilon : float or ndarray, optional
        Finite-difference step. Defaults to 1e-6 (1+|A_ij|).
    batched : bool
        Evaluate perturbed matrices in stacks of ``2*chunkSize``.

    Returns
    -------
    ndarray
        Gradient with the shape of A.

    Raises
    ------
    ValueError
        If epsilon is not positive or a perturbed cost is not finite.
    """
    A = np.asarray(A, dtype=float)
    if(epsilon is None):
        steps = 1e-6*(1.0+np.abs(A))
    else:
        steps = np.broadcast_to(np.asarray(epsilon, dtype=float), A.shape).copy()
    if(np.any(steps <= 0)):
        raise ValueError("epsilon must be positive")
    flatA = A.ravel()
    flatSteps = steps.ravel()
    gradient = np.empty(A.size)
    if(batched):
        for start in range(0, A.size, chunkSize):
            indices = np.arange(start, min(start+chunkSize, A.size))
            count = len(indices)
            rows = np.arange(count)
            perturbed = np.repeat(flatA[None, :], 2*count, axis=0)
            perturbed[rows, indices] += flatSteps[indices]
            perturbed[count+rows, indices] -= flatSteps[indices]
            costs = np.asarray(costFunction(perturbed.reshape((2*count,)+A.shape)), dtype=float)
            gradient[indices] = (costs[:count]-costs[count:])/(2*flatSteps[indices])
    else:
        trial = flatA.copy()
        for index in range(A.size):
            trial[index] = flatA[index]+flatSteps[index]
            plus = costFunction(trial.reshape(A.shape))
            trial[index] = flatA[index]-flatSteps[index]
            minus = costFunction(trial.reshape(A.shape))
            trial[index] = flatA[index]
            gradient[index] = (plus-minus)/(2*flatSteps[index])
    if(not np.all(np.isfinite(gradient))):
        raise ValueError("Cost evaluation failed (non-finite value) at a trial point")
    return gradient.reshape(A.shape)


def _initialParameters(config, init, seed):
    if(isinstance(init, str)):
        init = init.lower()
        if(init not in k_InitStrategies):
            raise ValueError(f"init must be one of the following: {', '.join(k_InitStrategies)}")
        if(init == "identity"):
            return np.eye(config.Na)
        return np.random.default_rng(seed).standard_normal((config.Na, config.Na))
    A = np.array(init, dtype=float)
    if(A.shape != (config.Na, config.Na)):
        raise ValueError(f"Initial A must be {config.Na}x{config.Na}, got {A.shape}")
    return A


def steepestDescent(spec, config=None, init="identity", seed=None, options=None, showProgress=False):
    """Minimizes J_BLUE or J_LMMSE over the real parameter matrix A.

    Parameters
    ----------
    spec : CostSpec
        Cost function to minimize.
    config : SystemConfig, optional
        Layout (default: SystemConfig()).
    init : str or ndarray
        "identity" (start from the systematic generator), "random" (i.i.d. N(0,1)
        entries drawn with ``seed``) or an explicit starting matrix.
    seed : int, optional
        Seed for the random initialization.
    options : DescentOptions, optional
        Stopping rules, step control and post-processing.
    showProgress : bool
        Show a tqdm progress bar with the current cost.

    Returns
    -------
    DescentResult
        Final A, the normalized (and optionally polished) generator, the raw
        generator G(A), the monotone trace of J and evaluation counts.
    """
    if(config is None):
        config = SystemConfig()
    if(options is None):
        options = DescentOptions()
    parametrization = _Parametrization(config, options.conditionLimit)
    A = _initialParameters(config, init, seed)

    def batchedCost(stack):
        generators, feasible = parametrization.generators(stack)
        cost = _costFromSquared(_squaredSingularValues(generators), spec, spec.estimator)
        return np.where(feasible, cost, np.inf)

    J = float(batchedCost(A))
    if(not np.isfinite(J)):
        raise InfeasibleParametrizationError("The initial parameter matrix does not give a feasible generator")
    minimum = closedFormMinimum(spec, config.Nd)
    trace = [J]
    evaluations = 1
    step = options.initialStep
    stalled = 0
    converged = False
    stopReason = "max_iterations"
    iterations = 0

    iterator = range(options.maxIterations)
    if(showProgress):
        iterator = tqdm(iterator, desc=f"Steepest descent ({spec.estimator})", leave=False)
    for iteration in iterator:
        if(options.targetGap is not None and (J-minimum)/minimum < options.targetGap):
            converged, stopReason = True, "target_gap"
            break
        try:
            gradient = numericGradient(batchedCost, A, options.epsilon, batched=True)
        except ValueError:
            stopReason = "infeasible_step"
            break
        evaluations += 2*A.size
        gradientNorm = np.linalg.norm(gradient)
        if(gradientNorm == 0):
            converged, stopReason = True, "zero_gradient"
            break
        direction = gradient/gradientNorm
        step = min(2*step, options.maxStep)
        accepted = False
        for _ in range(options.maxHalvings):
            candidate = A-step*direction
            candidateCost = float(batchedCost(candidate))
            evaluations += 1
            if(candidateCost < J):
                accepted = True
                break
            step /= 2
        if(not accepted):
            converged, stopReason = True, "no_descent"
            break
        relativeChange = (J-candidateCost)/J
        A, J = candidate, candidateCost
        trace.append(J)
        iterations = iteration+1
        stalled = stalled+1 if relativeChange < options.relativeTolerance else 0
        if(showProgress):
            iterator.set_postfix(J=J)
        if(stalled >= options.patience):
            converged, stopReason = True, "stalled"
            break
    else:
        if(options.targetGap is not None and (J-minimum)/minimum < options.targetGap):
            converged, stopReason = True, "target_gap"

    if(not converged):
        warnings.warn(f"Steepest descent stopped ({stopReason}) after {iterations} iterations without convergence; returning best-so-far J={J:.10g}", UWOFDMDiagnosticWarning, stacklevel=2)
    if((J-minimum)/minimum > options.costTolerance):
        warnings.warn(f"Final cost {J:.10g} is not within {options.costTolerance:g} of the closed-form minimum {minimum:.10g}", UWOFDMDiagnosticWarning, stacklevel=2)

    kind = "optblue" if spec.estimator == "blue" else "optlmmse"
    rawMat, _ = parametrization.generators(A)
    rawGenerator = GeneratorMatrix(mat=rawMat, kind=kind, config=config, A=A.copy())
    generator = polishGenerator(rawGenerator) if options.polish else rawGenerator
    generator = normalizeGenerator(generator, tolerance=None)
    report = certifyOptimality(generator, options.orthoTolerance)
    if(not report.isOptimal):
        warnings.warn(f"Optimized generator is not certified optimal (ortho residual {report.orthoResidual:.3g}, constraint residual {report.constraintResidual:.3g})", UWOFDMDiagnosticWarning, stacklevel=2)

    return DescentResult(
        A=A,
        generator=generator,
        rawGenerator=rawGenerator,
        trace=np.array(trace),
        iterations=iterations,
        costEvaluations=evaluations,
        converged=converged,
        stopReason=stopReason,
    )


def _gramSpectrum(G):
    mat = _generatorArray(G)
    s2 = _squaredSingularValues(mat)
    mean = float(np.mean(s2))
    return mat, s2, mean


def normalizeGenerator(G, tolerance=1e-3):
    """Scales G so that G^H G = I.

    Parameters
    ----------
    G : GeneratorMatrix
        Matrix with (approximately) equal singular values.
    tolerance : float or None
        Largest accepted relative spread (max-min)/mean of the squared singular
        values. None disables the check.

    Raises
    ------
    ValueError
        If the spread exceeds ``tolerance``.
    """
    mat, s2, mean = _gramSpectrum(G)
    spread = (s2[-1]-s2[0])/mean
    if(tolerance is not None and spread > tolerance):
        raise ValueError(f"Generator is not close to alpha-orthogonal (singular value spread {spread:.3g})")
    return replace(G, mat=mat/np.sqrt(mean), s2=1.0)


def polishGenerator(G):
    """Exact optimum closest to G.

    Projects the columns onto the nullspace of the last Nu rows of F^-1 B and
    replaces the result by its polar factor (orthonormal columns), keeping the
    mean squared singular value of G. The result carries no parameter matrix
    since no A generates it.
    """
    config = G.config
    tailRows = idftMatrix(config.N)[config.N-config.Nu:, config.occupiedIndices]
    basis = scipy.linalg.null_space(tailRows)
    mat, _, mean = _gramSpectrum(G)
    projected = basis @ (np.conj(basis.T) @ mat)
    unitary, _ = scipy.linalg.polar(projected)
    return replace(G, mat=unitary*np.sqrt(mean), s2=mean, A=None)


def certifyOptimality(G, tol=1e-6):
    """Checks the optimality conditions G^H G = s^2 I and F^-1 B G = [*; 0].

    Returns
    -------
    OptimalityReport
        ``isOptimal`` is True iff both residuals are below ``tol``.
    """
    mat, s2, mean = _gramSpectrum(G)
    gram = np.conj(mat.T) @ mat
    orthoResidual = float(np.max(np.abs(gram/mean-np.eye(mat.shape[1]))))
    constraintResidual = zeroWordResidual(mat, G.config)
    spread = float((s2[-1]-s2[0])/mean)
    return OptimalityReport(
        orthoResidual=orthoResidual,
        constraintResidual=constraintResidual,
        singularValueSpread=spread,
        s2=mean,
        isOptimal=bool(orthoResidual < tol and constraintResidual < tol),
    )


def scfdeGenerator(N, Nr, config=None):
    """Generator F_N [I; 0] turning UW-OFDM into UW-SC/FDE (requires B = I).

    Parameters
    ----------
    N : int
        DFT length.
    Nr : int
        Number of redundant symbols (= UW length).
    config : SystemConfig, optional
        Layout to attach. Must have no zero subcarriers. Built with
        ``singleCarrierConfig`` when omitted.
    """
    if(config is None):
        config = singleCarrierConfig(N, Nr)
    if(config.zeroIndices):
        raise ValueError("The SC/FDE generator requires a configuration without zero subcarriers")
    if(config.N != N or config.Nu != Nr):
        raise ValueError(f"Configuration (N={config.N}, Nu={config.Nu}) does not match N={N}, Nr={Nr}")
    mat = dftMatrix(N)[:, :N-Nr]
    return GeneratorMatrix(mat=mat, kind="scfde", config=config, s2=float(N))


def checkSymmetry(G, tol=1e-6):
    """Checks the column-flip symmetries of A and the conjugate column-flip symmetry of G.

    A is symmetric when its last columns are the flipped first columns in
    reverse order. G is conjugate-symmetric when column Nd-1-i equals the
    flipped, conjugated column i.

    Returns
    -------
    SymmetryReport
        ``aSymmetric``/``aResidual`` are None when G carries no parameter matrix.
    """
    mat = _generatorArray(G)
    Na, Nd = mat.shape
    if(Na % 2 or Nd % 2):
        raise ValueError("Symmetry checks need an even number of rows and columns")
    gResidual = float(np.linalg.norm(mat[:, ::-1]-np.conj(mat[::-1, :]))/np.linalg.norm(mat))
    A = getattr(G, "A", None)
    aSymmetric = None
    aResidual = None
    if(A is not None):
        aResidual = float(np.linalg.norm(A[:, ::-1]-A[::-1, :])/np.linalg.norm(A))
        aSymmetric = aResidual < tol
    return SymmetryReport(aSymmetric=aSymmetric, gConjSymmetric=gResidual < tol, aResidual=aResidual, gResidual=gResidual)

import uwofdm as uw

if __name__ == "__main__":

    config = uw.SystemConfig()
    spec = uw.CostSpec(estimator="lmmse", c=1.0)

    # Identity initialization starts the search at the systematic code
    options = uw.DescentOptions(targetGap=1e-4)
    result = uw.steepestDescent(spec, config, init="identity", options=options, showProgress=True)

    print(f"Stopped ({result.stopReason}) after {result.iterations} iterations")
    print(f"J_LMMSE = {result.trace[-1]:.6f} (closed-form minimum {uw.codegen.closedFormMinimum(spec, config.Nd):.6f})")

    report = uw.certifyOptimality(result.generator)
    print(f"Orthogonality residual {report.orthoResidual:.2e}, optimal: {report.isOptimal}")
    symmetry = uw.checkSymmetry(result.generator)
    print(f"Conjugate symmetric: {symmetry.gConjSymmetric}")

    uw.saveGenerator(result.generator, "gopt1.txt")
    uw.utilities.saveTrace(result.trace, "gopt1_trace.txt")

    # Random initialization (usually many more cost evaluations)
    randomResult = uw.steepestDescent(spec, config, init="random", seed=1, options=options, showProgress=True)
    print(f"Random start: {randomResult.costEvaluations} cost evaluations vs {result.costEvaluations}")
    uw.saveGenerator(randomResult.generator, "gopt2.txt")

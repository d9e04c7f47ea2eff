from .ofdmcore import SystemConfig
from .codegen import CostSpec, DescentOptions, steepestDescent, certifyOptimality, checkSymmetry, closedFormMinimum
from .channel import genChannelCorpus, k_DefaultDelaySpread, k_DefaultCorpusSize
from .utilities import saveChannelCorpus, loadSystemConfig, saveGenerator, loadGenerator, saveTrace
from .simkit import Scenario, runBER, runPSD, exportResults, plotData, savePSD, loadScenarios, outOfBandLevel
from tqdm.auto import tqdm


k_Commands = ["gen-channels", "optimize-matrix", "certify", "simulate-ber", "psd"]


def _systemConfig(configFile):
    if(configFile is None):
        return SystemConfig()
    return loadSystemConfig(configFile)


def genChannelsApp(outputFile, count=k_DefaultCorpusSize, seed=0, delaySpread=k_DefaultDelaySpread, configFile=None, verbose=True):
    """Generates the channel corpus file shared by all BER simulations."""
    config = _systemConfig(configFile)
    if(verbose):
        print(f"Generating {count} channels (tau_rms={delaySpread*1e9:g} ns, seed {seed})")
    corpus = genChannelCorpus(count, config, delaySpread, seed, showProgress=verbose)
    saveChannelCorpus(corpus, outputFile)
    if(verbose):
        print(f"Saved corpus {corpus.corpusId} to {outputFile}")
    return corpus


def optimizeMatrixApp(
        outputFile,
        estimator="lmmse",
        c=1.0,
        init="identity",
        seed=None,
        maxIterations=50000,
        targetGap=None,
        polish=True,
        traceFile=None,
        configFile=None,
        verbose=True,
):
    """Runs the steepest descent search and saves the normalized generator matrix.

    Parameters
    ----------
    outputFile : str or pathlib.Path
        Generator matrix file to write.
    estimator : str
        "blue" or "lmmse" cost function.
    c : float
        Fixed Es/sigma_n^2 ratio of the cost function.
    init : str
        "identity" or "random".
    seed : int, optional
        Seed of the random initialization.
    maxIterations : int
        Iteration limit of the descent.
    targetGap : float, optional
        Stop once the relative gap to the closed-form minimum is below this value.
    polish : bool
        Apply the exact-optimum polish before normalization.
    traceFile : str or pathlib.Path, optional
        File receiving the cost trace, one value per line.
    configFile : str or pathlib.Path, optional
        JSON system configuration. The defaults are used when omitted.
    verbose : bool
        Show progress and a summary.
    """
    config = _systemConfig(configFile)
    spec = CostSpec(estimator=estimator, c=c, sigmaD2=config.sigmaD2)
    options = DescentOptions(maxIterations=maxIterations, targetGap=targetGap, polish=polish)
    if(verbose):
        print(f"Minimizing J_{estimator.upper()} (c={c:g}, init={init}) for N={config.N}, Nd={config.Nd}, Nr={config.Nr}")
    result = steepestDescent(spec, config, init=init, seed=seed, options=options, showProgress=verbose)
    saveGenerator(result.generator, outputFile)
    if(traceFile is not None):
        saveTrace(result.trace, traceFile)
    if(verbose):
        minimum = closedFormMinimum(spec, config.Nd)
        print(f"Stopped ({result.stopReason}) after {result.iterations} iterations and {result.costEvaluations} cost evaluations")
        print(f"J = {result.trace[-1]:.10g} (closed-form minimum {minimum:.10g})")
        print(f"Saved generator matrix to {outputFile}")
    return result


def certifyApp(inputFile, tolerance=1e-6, verbose=True):
    """Prints the optimality and symmetry report of a stored generator matrix."""
    generator = loadGenerator(inputFile)
    report = certifyOptimality(generator, tolerance)
    if(verbose):
        print(f"Generator matrix {inputFile} ({generator.kind}, {generator.mat.shape[0]}x{generator.mat.shape[1]})")
        print(f"  ortho residual:        {report.orthoResidual:.3e}")
        print(f"  constraint residual:   {report.constraintResidual:.3e}")
        print(f"  singular value spread: {report.singularValueSpread:.3e}")
        print(f"  s^2:                   {report.s2:.10g}")
        print(f"  optimal:               {report.isOptimal}")
    if(generator.mat.shape[0] % 2 == 0 and generator.mat.shape[1] % 2 == 0):
        symmetry = checkSymmetry(generator, tolerance)
        if(verbose):
            print(f"  conjugate symmetric:   {symmetry.gConjSymmetric} (residual {symmetry.gResidual:.3e})")
            if(symmetry.aSymmetric is not None):
                print(f"  A column symmetric:    {symmetry.aSymmetric} (residual {symmetry.aResidual:.3e})")
    return report


def simulateBERApp(outputFile, scenarios, plotDirectory=None, verbose=True):
    """Runs every scenario and appends the records to the results file."""
    allRecords = []
    scenarioIterator = scenarios
    if(verbose):
        scenarioIterator = tqdm(scenarios, desc="Simulating scenarios")
    for scenario in scenarioIterator:
        records = runBER(scenario, showProgress=verbose)
        exportResults(records, outputFile)
        allRecords.extend(records)
    if(plotDirectory is not None):
        paths = plotData(allRecords, plotDirectory)
        if(verbose):
            print(f"Wrote {len(paths)} curve files to {plotDirectory}")
    if(verbose):
        print(f"Appended {len(allRecords)} records to {outputFile}")
    return allRecords


def psdApp(outputFile, systemId, nSymbols=1000, uwMode="zero", generatorFile=None, oversampling=4, seed=0, verbose=True):
    """Estimates the PSD of one system and writes the curve file."""
    generators = {}
    if(generatorFile is not None):
        generators[systemId] = loadGenerator(generatorFile)
    curve = runPSD(systemId, nSymbols, uwMode, generators, oversampling, seed)
    savePSD(curve, outputFile)
    if(verbose):
        print(f"Sidelobe level (15-30 MHz) of {systemId}: {outOfBandLevel(curve):.2f} dB")
        print(f"Saved PSD to {outputFile}")
    return curve


def standaloneApp(command, **parameters):
    """Dispatches one of the command line tools.

    Parameters
    ----------
    command : str
        One of "gen-channels", "optimize-matrix", "certify", "simulate-ber", "psd".
    **parameters
        Keyword arguments of the corresponding ``*App`` function.
    """
    if command not in k_Commands:
        raise ValueError(f"command must be one of the following: {', '.join(k_Commands)}")
    if(command == "gen-channels"):
        return genChannelsApp(**parameters)
    if(command == "optimize-matrix"):
        return optimizeMatrixApp(**parameters)
    if(command == "certify"):
        return certifyApp(**parameters)
    if(command == "simulate-ber"):
        return simulateBERApp(**parameters)
    return psdApp(**parameters)


def _buildParser():
    import argparse
    import pathlib
    from argparse import RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(
        prog="uwofdm",
        description='UW-OFDM simulation toolkit: channel corpora, generator matrix optimization, BER and PSD simulations.',
        formatter_class=RawDescriptionHelpFormatter,
        epilog=\
            """
Examples:
---------
Generate the 5000 realization channel corpus:
>uwofdm gen-channels -o channels.txt -n 5000 -s 1

Optimize a generator matrix for the LMMSE cost (c=1) starting from the systematic code:
>uwofdm optimize-matrix -e lmmse -r 1 -i identity -o gopt1.txt -j gopt1_trace.txt

Same with a random start:
>uwofdm optimize-matrix -e lmmse -r 1 -i random -s 7 -o gopt2.txt

Check a stored matrix:
>uwofdm certify -i gopt1.txt

Run the scenarios of a scenario file and write curve files:
>uwofdm simulate-ber -q scenarios.tsv -o results.csv -p curves

scenarios.tsv:
system	estimator	rate	esn0	channel	corpus	corpuscount	generator
uw-gopt1	lmmse	uncoded	0,4,8,12	corpus	channels.txt	500	gopt1.txt
uw-g	lmmse	uncoded	0,4,8,12	corpus	channels.txt	500
cp-ofdm	onetap	uncoded	0,4,8,12	corpus	channels.txt	500

Estimate the spectrum of a system:
>uwofdm psd -y uw-gopt1 -G gopt1.txt -n 2000 -o psd_gopt1.csv

File formats
------------
See README.md for the generator, corpus, results and curve file formats.
"""
        )
    subparsers = parser.add_subparsers(dest="command")

    channels = subparsers.add_parser("gen-channels", help="Generate and save a channel corpus.")
    channels.add_argument("-o", "--outputfile", type=pathlib.Path, required=True, help='Path of the corpus file to write.')
    channels.add_argument("-n", "--count", type=int, help=f'Number of realizations. The default is {k_DefaultCorpusSize}.')
    channels.add_argument("-s", "--seed", type=int, help='Seed of the corpus. The default is 0.')
    channels.add_argument("-t", "--delayspread", type=float, help='RMS delay spread in ns. The default is 100.')
    channels.add_argument("-c", "--configfile", type=pathlib.Path, help='JSON system configuration. Missing keys assume default values.')
    channels.add_argument("-Q", "--quiet", action='store_true', help='If enabled the progress will not be printed.')

    optimize = subparsers.add_parser("optimize-matrix", help="Optimize a non-systematic generator matrix.")
    optimize.add_argument("-o", "--outputfile", type=pathlib.Path, required=True, help='Path of the generator matrix file to write.')
    optimize.add_argument("-e", "--estimator", type=str, help='Cost function, "blue" or "lmmse". The default is "lmmse".')
    optimize.add_argument("-r", "--ratio", type=float, help='Fixed Es/sigma_n^2 ratio c of the cost function. The default is 1.')
    optimize.add_argument("-i", "--init", type=str, help='Initialization, "identity" or "random". The default is "identity".')
    optimize.add_argument("-s", "--seed", type=int, help='Seed of the random initialization.')
    optimize.add_argument("-m", "--maxiterations", type=int, help='Maximum number of descent iterations. The default is 50000.')
    optimize.add_argument("-g", "--targetgap", type=float, help='Stop once (J-Jmin)/Jmin is below this value. The default is None.')
    optimize.add_argument("-j", "--tracefile", type=pathlib.Path, help='File receiving the cost trace.')
    optimize.add_argument("-n", "--no_polish", action='store_true', help='If enabled the exact-optimum polish is skipped.')
    optimize.add_argument("-c", "--configfile", type=pathlib.Path, help='JSON system configuration. Missing keys assume default values.')
    optimize.add_argument("-Q", "--quiet", action='store_true', help='If enabled the progress will not be printed.')

    certify = subparsers.add_parser("certify", help="Print the optimality report of a generator matrix.")
    certify.add_argument("-i", "--inputfile", type=pathlib.Path, required=True, help='Generator matrix file.')
    certify.add_argument("-t", "--tolerance", type=float, help='Residual tolerance. The default is 1e-6.')

    simulate = subparsers.add_parser("simulate-ber", help="Run BER scenarios and append the results.")
    simulate.add_argument("-o", "--outputfile", type=pathlib.Path, required=True, help='Results file (appended).')
    simulate.add_argument("-q", "--scenariofile", type=str, help='csv or tsv scenario file. Allowed columns are: "system", "estimator", "rate", "constellation", "esn0", "channel", "corpus", "corpuscount", "csi", "minerrors", "maxbits", "symbols", "seed", "generator", "uwmode". Missing columns will assume default values.')
    simulate.add_argument("-y", "--system", type=str, help='System of a single scenario (cp-ofdm, uw-g, uw-gopt1, uw-gopt2, uw-scfde).')
    simulate.add_argument("-e", "--estimator", type=str, help='Estimator of a single scenario (blue, lmmse, ci, onetap).')
    simulate.add_argument("-r", "--rate", type=str, help='Outer code rate (uncoded, 1/2, 3/4).')
    simulate.add_argument("-m", "--constellation", type=str, help='qpsk or 16qam.')
    simulate.add_argument("-g", "--esn0", type=str, help='Comma separated Es/N0 grid in dB.')
    simulate.add_argument("-k", "--corpus", type=str, help='Channel corpus file (frequency-selective simulation). AWGN when omitted.')
    simulate.add_argument("-n", "--corpuscount", type=int, help='Use only the first realizations of the corpus.')
    simulate.add_argument("-x", "--csi", type=str, help='perfect or estimated channel knowledge.')
    simulate.add_argument("-G", "--generator", type=str, help='Generator matrix file of the optimized systems.')
    simulate.add_argument("-E", "--minerrors", type=int, help='Bit errors collected per Es/N0 point before stopping. The default is 100.')
    simulate.add_argument("-b", "--maxbits", type=int, help='Bit budget per Es/N0 point. The default is 1000000.')
    simulate.add_argument("-S", "--symbols", type=int, help='OFDM symbols per frame. The default is 4.')
    simulate.add_argument("-s", "--seed", type=int, help='Base seed of the scenario. The default is 0.')
    simulate.add_argument("-u", "--uwmode", type=str, help='zero or chirp unique word. The default is chirp.')
    simulate.add_argument("-p", "--plotdir", type=pathlib.Path, help='Directory receiving one curve file per scenario.')
    simulate.add_argument("-Q", "--quiet", action='store_true', help='If enabled the progress will not be printed.')

    psd = subparsers.add_parser("psd", help="Estimate the power spectral density of a system.")
    psd.add_argument("-o", "--outputfile", type=pathlib.Path, required=True, help='PSD file to write (csv).')
    psd.add_argument("-y", "--system", type=str, required=True, help='System (cp-ofdm, uw-g, uw-gopt1, uw-gopt2, uw-scfde).')
    psd.add_argument("-n", "--symbols", type=int, help='Number of symbols of the burst. The default is 1000.')
    psd.add_argument("-u", "--uwmode", type=str, help='zero or chirp unique word. The default is zero.')
    psd.add_argument("-G", "--generator", type=str, help='Generator matrix file of the optimized systems.')
    psd.add_argument("-v", "--oversampling", type=int, help='Oversampling factor of the synthesis. The default is 4.')
    psd.add_argument("-s", "--seed", type=int, help='Seed of the data symbols. The default is 0.')
    psd.add_argument("-Q", "--quiet", action='store_true', help='If enabled the summary will not be printed.')
    return parser


def processCMDParameters(arguments=None):
    import sys
    parser = _buildParser()
    args = parser.parse_args(arguments)

    #if no command is provided, print help
    if args.command is None:
        parser.print_help()
        sys.exit(1)

    parameters = {}
    if args.command == "gen-channels":
        parameters["outputFile"] = args.outputfile
        if args.count is not None:
            parameters["count"] = args.count
        if args.seed is not None:
            parameters["seed"] = args.seed
        if args.delayspread is not None:
            parameters["delaySpread"] = args.delayspread*1e-9
        parameters["configFile"] = args.configfile
        parameters["verbose"] = not args.quiet

    elif args.command == "optimize-matrix":
        parameters["outputFile"] = args.outputfile
        if args.estimator is not None:
            parameters["estimator"] = args.estimator
        if args.ratio is not None:
            parameters["c"] = args.ratio
        if args.init is not None:
            parameters["init"] = args.init
        if args.maxiterations is not None:
            parameters["maxIterations"] = args.maxiterations
        parameters["seed"] = args.seed
        parameters["targetGap"] = args.targetgap
        parameters["traceFile"] = args.tracefile
        parameters["polish"] = not args.no_polish
        parameters["configFile"] = args.configfile
        parameters["verbose"] = not args.quiet

    elif args.command == "certify":
        parameters["inputFile"] = args.inputfile
        if args.tolerance is not None:
            parameters["tolerance"] = args.tolerance

    elif args.command == "simulate-ber":
        singleOptions = {}
        if args.system:
            singleOptions["system"] = args.system
        if args.estimator:
            singleOptions["estimator"] = args.estimator
        if args.rate:
            singleOptions["rate"] = args.rate
        if args.constellation:
            singleOptions["constellation"] = args.constellation.lower()
        if args.esn0:
            singleOptions["esn0Grid"] = tuple(float(value) for value in args.esn0.split(","))
        if args.corpus:
            singleOptions["channel"] = "corpus"
            singleOptions["corpusPath"] = args.corpus
        if args.corpuscount is not None:
            singleOptions["corpusCount"] = args.corpuscount
        if args.csi:
            singleOptions["csi"] = args.csi
        if args.generator:
            singleOptions["generatorPath"] = args.generator
        if args.minerrors is not None:
            singleOptions["minErrors"] = args.minerrors
        if args.maxbits is not None:
            singleOptions["maxBits"] = args.maxbits
        if args.symbols is not None:
            singleOptions["symbolsPerFrame"] = args.symbols
        if args.seed is not None:
            singleOptions["seed"] = args.seed
        if args.uwmode:
            singleOptions["uwMode"] = args.uwmode.lower()

        if args.scenariofile:
            if args.system or args.estimator or args.rate or args.esn0:
                raise ValueError("System, estimator, rate and esn0 parameters cannot be used with a scenario file.")
            parameters["scenarios"] = loadScenarios(args.scenariofile, **singleOptions)
        else:
            if not args.system:
                raise ValueError("Either a scenario file or a system must be provided.")
            parameters["scenarios"] = [Scenario(**singleOptions)]
        parameters["outputFile"] = args.outputfile
        parameters["plotDirectory"] = args.plotdir
        parameters["verbose"] = not args.quiet

    else:
        parameters["outputFile"] = args.outputfile
        parameters["systemId"] = args.system
        if args.symbols is not None:
            parameters["nSymbols"] = args.symbols
        if args.uwmode is not None:
            parameters["uwMode"] = args.uwmode
        if args.oversampling is not None:
            parameters["oversampling"] = args.oversampling
        if args.seed is not None:
            parameters["seed"] = args.seed
        parameters["generatorFile"] = args.generator
        parameters["verbose"] = not args.quiet

    return args.command, parameters


def main():
    command, parameters = processCMDParameters()
    standaloneApp(command, **parameters)

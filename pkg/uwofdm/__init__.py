from .ofdmcore import SystemConfig, ConfigurationError, UWOFDMDiagnosticWarning, singleCarrierConfig, assembleTx, meanSymbolEnergy, meanSubcarrierPowers, zeroWordResidual
from .codegen import GeneratorMatrix, CostSpec, DescentOptions, InfeasibleParametrizationError, systematicGenerator, buildGFromA, steepestDescent, normalizeGenerator, polishGenerator, certifyOptimality, scfdeGenerator, checkSymmetry, costBLUE, costLMMSE
from .channel import ChannelRealization, ChannelCorpus, NoiseSpec, genMultipath, genChannelCorpus, applyChannel, toFreq
from .receiver import Equalizer, RankDeficientChannelError, blueEqualizer, lmmseEqualizer, ciEqualizer, estimateChannel, smoothingMatrix
from .fec import OuterCodeSpec, encode, viterbiDecode, mapQAM, softDemap, interleave, deinterleave
from .simkit import Scenario, BerRecord, CpOfdmConfig, runBER, runPSD, exportResults, loadResults, plotData
from .utilities import saveGenerator, loadGenerator, saveChannelCorpus, loadChannelCorpus, loadSystemConfig, saveSystemConfig
from .standalone import main

from dataclasses import dataclass, field, asdict
from functools import cached_property
from pathlib import Path
import hashlib
import uuid
import warnings
import numpy as np
import pandas as pd
import scipy.signal
import scipy.special
from tqdm.auto import tqdm

from .ofdmcore import (
    SystemConfig,
    UWOFDMDiagnosticWarning,
    assembleTx,
    expandSubcarriers,
    meanSymbolEnergy,
    uwFrequency,
    k_DefaultZeroIndices,
)
from .codegen import systematicGenerator, scfdeGenerator
from .channel import ChannelRealization, NoiseSpec, applyChannel, complexNoise
from .utilities import loadGenerator, loadChannelCorpus
from .receiver import (
    RankDeficientChannelError,
    blueEqualizer,
    lmmseEqualizer,
    ciEqualizer,
    subtractUW,
    receiveFrequency,
    makePreamble,
    estimateChannel,
)
from .fec import (
    OuterCodeSpec,
    encode,
    viterbiDecode,
    interleave,
    deinterleave,
    mapQAM,
    softDemap,
    hardDecision,
    payloadBits,
    codedLength,
    k_BitsPerSymbol,
)

k_SystemIds = ["cp-ofdm", "uw-g", "uw-gopt1", "uw-gopt2", "uw-scfde"]
k_EstimatorNames = ["blue", "lmmse", "ci", "onetap"]
k_OuterRates = ["uncoded", "1/2", "3/4"]
k_ChannelModes = ["awgn", "corpus"]
k_CsiModes = ["perfect", "estimated"]
k_UWModes = ["chirp", "zero"]
k_UWEnergyRatio = 4/52
k_SidelobeBand = (15e6, 30e6)
k_WelchSegmentSymbols = 16
k_ResultsHeader = "# uwofdm-results 1"
k_StringColumns = ["systemId", "estimator", "outerRate", "constellation", "corpusId", "csi", "stopReason", "fingerprint", "runId"]


def _parseGrid(text):
    return tuple(float(value) for value in text.replace(";", ",").split(",") if value.strip())


# scenario file column -> (Scenario field, converter)
k_ScenarioColumns = {
    "system": ("system", str.lower),
    "estimator": ("estimator", str.lower),
    "rate": ("rate", str.lower),
    "constellation": ("constellation", str.lower),
    "esn0": ("esn0Grid", _parseGrid),
    "channel": ("channel", str.lower),
    "corpus": ("corpusPath", str),
    "corpuscount": ("corpusCount", int),
    "csi": ("csi", str.lower),
    "minerrors": ("minErrors", int),
    "maxbits": ("maxBits", lambda value: int(float(value))),
    "symbols": ("symbolsPerFrame", int),
    "seed": ("seed", int),
    "generator": ("generatorPath", str),
    "uwmode": ("uwMode", str.lower),
}


@dataclass(frozen=True)
class CpOfdmConfig:
    """WLAN-like CP-OFDM reference: 48 data and 4 pilot subcarriers, 16 sample cyclic prefix."""
    N: int = 64
    cpLength: int = 16
    zeroIndices: tuple = k_DefaultZeroIndices
    pilotIndices: tuple = (7, 21, 43, 57)
    pilotValues: tuple = (1.0, -1.0, 1.0, 1.0)
    sigmaD2: float = 1.0
    fs: float = 20e6

    def __post_init__(self):
        if(set(self.pilotIndices) & set(self.zeroIndices)):
            raise ValueError("Pilot subcarriers must not be zero subcarriers")
        if(len(self.pilotValues) != len(self.pilotIndices)):
            raise ValueError("One pilot value per pilot subcarrier is required")
        if(self.dataCount <= 0 or self.cpLength < 0):
            raise ValueError("Invalid CP-OFDM layout")

    @property
    def dataCount(self):
        return self.N-len(self.pilotIndices)-len(self.zeroIndices)

    @property
    def pilotCount(self):
        return len(self.pilotIndices)

    @cached_property
    def dataIndices(self):
        used = set(self.zeroIndices) | set(self.pilotIndices)
        return np.array([k for k in range(self.N) if k not in used], dtype=int)

    @cached_property
    def layout(self):
        """Occupied-subcarrier view (Nu = cpLength) used by the channel estimator."""
        zeroSet = set(self.zeroIndices)
        occupied = [k for k in range(self.N) if k not in zeroSet]
        return SystemConfig(N=self.N, Nu=self.cpLength, zeroIndices=self.zeroIndices, redundantIndices=tuple(occupied[:self.cpLength]), sigmaD2=self.sigmaD2, fs=self.fs)

    @property
    def symbolEnergy(self):
        """Mean energy of one transmitted symbol including the cyclic prefix."""
        occupiedPower = self.sigmaD2*(self.dataCount+self.pilotCount)
        return occupiedPower/self.N*(self.N+self.cpLength)/self.N


@dataclass
class Scenario:
    """One BER curve to simulate.

    Parameters
    ----------
    system : str
        One of ``k_SystemIds``.
    estimator : str
        "blue", "lmmse", "ci" (systematic generator only) or "onetap" (CP-OFDM).
    rate : str
        "uncoded", "1/2" or "3/4".
    constellation : str
        "qpsk" or "16qam".
    esn0Grid : tuple of float
        Es/N0 points in dB.
    channel : str
        "awgn" or "corpus".
    corpusPath : str, optional
        Channel corpus file (required for "corpus" unless a corpus object is passed to ``runBER``).
    corpusCount : int, optional
        Use only the first ``corpusCount`` realizations.
    csi : str
        "perfect" or "estimated" (preamble based channel estimation).
    minErrors, maxBits : int
        Stop rule of every Es/N0 point.
    symbolsPerFrame : int
        OFDM symbols per coded frame (one channel realization per frame).
    seed : int
        Master seed of the Monte-Carlo run.
    generatorPath : str, optional
        Generator matrix file for the optimized systems.
    uwMode : str
        "chirp" or "zero" unique word.
    """
    system: str = "uw-gopt1"
    estimator: str = "lmmse"
    rate: str = "uncoded"
    constellation: str = "qpsk"
    esn0Grid: tuple = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0)
    channel: str = "awgn"
    corpusPath: str = None
    corpusCount: int = None
    csi: str = "perfect"
    minErrors: int = 100
    maxBits: int = 1000000
    symbolsPerFrame: int = 4
    seed: int = 0
    generatorPath: str = None
    uwMode: str = "chirp"

    def __post_init__(self):
        for name, value, allowed in [
            ("system", self.system, k_SystemIds),
            ("estimator", self.estimator, k_EstimatorNames),
            ("rate", self.rate, k_OuterRates),
            ("constellation", self.constellation, list(k_BitsPerSymbol)),
            ("channel", self.channel, k_ChannelModes),
            ("csi", self.csi, k_CsiModes),
            ("uwMode", self.uwMode, k_UWModes),
        ]:
            if(value not in allowed):
                raise ValueError(f"{name} must be one of the following: {', '.join(allowed)}")
        if(self.estimator == "ci" and self.system != "uw-g"):
            raise ValueError("Channel inversion needs the systematic generator (system uw-g)")
        if(self.estimator == "onetap" and self.system != "cp-ofdm"):
            raise ValueError("The one-tap equalizer belongs to the cp-ofdm system")
        if(self.symbolsPerFrame < 1):
            raise ValueError("symbolsPerFrame must be at least 1")
        self.esn0Grid = tuple(float(value) for value in np.atleast_1d(self.esn0Grid))

    @property
    def fingerprint(self):
        return self.fingerprintFor()

    def fingerprintFor(self, corpusId=None):
        """Short hash of every scenario field and, when given, the id of the corpus actually simulated."""
        grid = ",".join(f"{value:g}" for value in self.esn0Grid)
        values = [
            self.system, self.estimator, self.rate, self.constellation, grid, self.channel,
            self.corpusPath, self.corpusCount, corpusId, self.csi, self.minErrors, self.maxBits,
            self.symbolsPerFrame, self.seed, self.generatorPath, self.uwMode,
        ]
        key = "|".join(str(value) for value in values)
        return hashlib.sha1(key.encode("utf8")).hexdigest()[:12]


@dataclass
class BerRecord:
    systemId: str
    estimator: str
    outerRate: str
    constellation: str
    esn0Db: float
    ebn0Db: float
    bitsSent: int
    bitErrors: int
    corpusId: str
    seed: int
    csi: str = "perfect"
    stopReason: str = "min_errors"
    fingerprint: str = ""
    runId: str = ""

    @property
    def ber(self):
        return self.bitErrors/self.bitsSent if self.bitsSent else np.nan


@dataclass(frozen=True, eq=False)
class PsdCurve:
    systemId: str
    frequency: np.ndarray
    psdDb: np.ndarray


@dataclass
class _SystemModel:
    systemId: str
    config: object
    generator: object = None
    uw: np.ndarray = None
    totalEnergy: float = 0.0
    dataPerSymbol: int = 0
    cpConfig: CpOfdmConfig = None
    preamble: object = field(default=None, repr=False)

    def __post_init__(self):
        # preamble symbols carry the energy of one symbol without guard
        guard = self.cpConfig.cpLength if self.cpConfig is not None else 0
        self.preamble = makePreamble(self.config, energy=self.totalEnergy*self.config.N/(self.config.N+guard))


def chirpUniqueWord(config, energy):
    """Constant-envelope linear chirp of Nu samples sweeping the occupied bandwidth, with the given energy."""
    n = np.arange(config.Nu)
    bandwidth = config.Na/config.N
    phase = np.pi*bandwidth*(n**2/config.Nu-n)
    return np.sqrt(energy/config.Nu)*np.exp(1j*phase)


def analyticQpskBer(errorVariance, sigmaD2=1.0):
    """Gray QPSK bit error rate Q(sqrt(sigma_d^2/sigma_e^2)) for Gaussian estimation errors."""
    snr = sigmaD2/np.asarray(errorVariance, dtype=float)
    return 0.5*scipy.special.erfc(np.sqrt(snr)/np.sqrt(2))


def _uwEnergies(generator, config):
    dataEnergy = meanSymbolEnergy(generator, config)
    uwEnergy = dataEnergy*k_UWEnergyRatio/(1-k_UWEnergyRatio)
    return dataEnergy+uwEnergy, uwEnergy


def buildSystem(systemId, generators=None, uwMode="chirp", generatorPath=None, config=None, cpConfig=None):
    """Transmitter/receiver description of one system (layout, generator, unique word, energies).

    Parameters
    ----------
    systemId : str
        One of ``k_SystemIds``.
    generators : dict, optional
        GeneratorMatrix objects keyed by system id, used for the optimized systems.
    uwMode : str
        "chirp" (energy 4/52 of the total) or "zero".
    generatorPath : str, optional
        Generator matrix file used when ``generators`` has no entry.
    """
    if(systemId not in k_SystemIds):
        raise ValueError(f"system must be one of the following: {', '.join(k_SystemIds)}")
    if(systemId == "cp-ofdm"):
        cpConfig = cpConfig or CpOfdmConfig()
        return _SystemModel(systemId=systemId, config=cpConfig.layout, totalEnergy=cpConfig.symbolEnergy, dataPerSymbol=cpConfig.dataCount, cpConfig=cpConfig)

    generators = generators or {}
    if(systemId in generators):
        generator = generators[systemId]
    elif(systemId == "uw-g"):
        generator = systematicGenerator(config or SystemConfig())
    elif(systemId == "uw-scfde"):
        generator = scfdeGenerator(64, 16) if config is None else scfdeGenerator(config.N, config.Nu, config)
    elif(generatorPath is not None):
        generator = loadGenerator(generatorPath)
    else:
        raise ValueError(f"System {systemId} needs an optimized generator matrix (see optimize-matrix)")
    generatorConfig = generator.config
    totalEnergy, uwEnergy = _uwEnergies(generator, generatorConfig)
    if(uwMode == "zero"):
        uw = None
    else:
        uw = chirpUniqueWord(generatorConfig, uwEnergy)
    return _SystemModel(systemId=systemId, config=generatorConfig, generator=generator, uw=uw, totalEnergy=totalEnergy, dataPerSymbol=generatorConfig.Nd)


def noiseVariance(system, esn0Db):
    """Time-domain noise variance for Es/N0 in dB, with Es the total symbol energy per payload QAM symbol."""
    es = system.totalEnergy/system.dataPerSymbol
    return es/10**(esn0Db/10)


def cpOfdmTransmit(dataSymbols, cpConfig):
    """Builds the CP-OFDM burst: data and pilots on their subcarriers, IDFT, cyclic prefix."""
    dataSymbols = np.atleast_2d(dataSymbols)
    spectrum = np.zeros((dataSymbols.shape[0], cpConfig.N), dtype=complex)
    spectrum[:, cpConfig.dataIndices] = dataSymbols
    spectrum[:, list(cpConfig.pilotIndices)] = np.array(cpConfig.pilotValues)*np.sqrt(cpConfig.sigmaD2)
    symbols = np.fft.ifft(spectrum, axis=-1)
    return np.concatenate([symbols[:, cpConfig.N-cpConfig.cpLength:], symbols], axis=1)


def cpOfdmReference(dataSymbols, channel, noise=None, cpConfig=None, rng=None, channelEstimate=None):
    """CP-OFDM reference link: CP insertion, linear convolution, CP removal, FFT and one-tap equalization.

    Parameters
    ----------
    dataSymbols : ndarray
        Shape (S, 48) QAM symbols.
    channel : ChannelRealization or ndarray
        Channel taps (length at most the CP length).
    noise : NoiseSpec, optional
    cpConfig : CpOfdmConfig, optional
    rng : numpy.random.Generator, optional
    channelEstimate : ndarray, optional
        Downsized (occupied subcarriers) channel estimate used instead of the true channel.

    Returns
    -------
    (ndarray, ndarray)
        Equalized data symbols and the per-subcarrier error variance N sigma_n^2/|H_k|^2.
        Subcarriers with a zero channel coefficient return 0 with infinite variance.
    """
    if(cpConfig is None):
        cpConfig = CpOfdmConfig()
    h = np.asarray(getattr(channel, "h", channel))
    if(h.size > cpConfig.cpLength+1):
        raise ValueError(f"Channel has {h.size} taps, longer than the cyclic prefix")
    burst = cpOfdmTransmit(dataSymbols, cpConfig)
    symbolCount, symbolLength = burst.shape
    received = np.convolve(burst.ravel(), h)[:burst.size]
    sigmaN2 = 0.0 if noise is None else noise.sigmaN2
    if(sigmaN2 > 0):
        if(rng is None):
            rng = np.random.default_rng()
        received = received+complexNoise(received.shape, sigmaN2, rng)
    received = received.reshape(symbolCount, symbolLength)[:, cpConfig.cpLength:]
    spectrum = np.fft.fft(received, axis=-1)
    if(channelEstimate is None):
        H = np.fft.fft(h, n=cpConfig.N)[cpConfig.dataIndices]
    else:
        positions = np.searchsorted(cpConfig.layout.occupiedIndices, cpConfig.dataIndices)
        H = np.asarray(channelEstimate)[positions]
    zero = np.abs(H) == 0
    safeH = np.where(zero, 1.0, H)
    estimates = np.where(zero, 0.0, spectrum[:, cpConfig.dataIndices]/safeH)
    with np.errstate(divide="ignore"):
        CeeDiag = np.where(zero, np.inf, cpConfig.N*sigmaN2/np.abs(safeH)**2)
    return estimates, CeeDiag


def _estimatedResponse(system, channel, sigmaN2, rng):
    noise = NoiseSpec(sigmaN2)
    yp1 = applyChannel(system.preamble.timeSymbol, channel, noise, rng=rng)
    yp2 = applyChannel(system.preamble.timeSymbol, channel, noise, rng=rng)
    return estimateChannel(yp1, yp2, system.preamble, system.config).HhatDiag


def _uwEqualizer(system, estimator, Hd, sigmaN2):
    generator = system.generator
    config = system.config
    if(estimator == "blue"):
        return blueEqualizer(generator, Hd, sigmaN2, config.N)
    if(estimator == "lmmse"):
        return lmmseEqualizer(generator, Hd, config.N*sigmaN2/config.sigmaD2, config.sigmaD2)
    if(generator.kind != "systematic"):
        raise ValueError("Channel inversion needs a systematic generator matrix")
    return ciEqualizer(Hd, config, sigmaN2)


def simulateFrame(system, scenario, channel, sigmaN2, rng):
    """Transmits and decodes one frame of ``scenario.symbolsPerFrame`` symbols.

    Returns
    -------
    (int, int)
        Payload bits sent and bit errors.

    Raises
    ------
    RankDeficientChannelError
        If no equalizer exists for the channel.
    """
    bitsPerSymbol = k_BitsPerSymbol[scenario.constellation]
    blockSize = system.dataPerSymbol*bitsPerSymbol
    capacity = scenario.symbolsPerFrame*blockSize
    sigmaD2 = system.config.sigmaD2
    if(scenario.rate == "uncoded"):
        payload = rng.integers(0, 2, capacity)
        channelBits = payload
    else:
        codeSpec = OuterCodeSpec(rate=scenario.rate)
        payload = rng.integers(0, 2, payloadBits(capacity, codeSpec))
        coded = encode(payload, codeSpec)
        filler = np.zeros(capacity-coded.size, dtype=coded.dtype)
        channelBits = interleave(np.concatenate([coded, filler]), blockSize, bitsPerSymbol)
    symbols = mapQAM(channelBits, scenario.constellation, sigmaD2).reshape(scenario.symbolsPerFrame, system.dataPerSymbol)

    if(scenario.csi == "estimated"):
        Hd = _estimatedResponse(system, channel, sigmaN2, rng)
    else:
        Hd = None

    if(system.systemId == "cp-ofdm"):
        estimates, CeeDiag = cpOfdmReference(symbols, channel, NoiseSpec(sigmaN2), system.cpConfig, rng, Hd)
    else:
        config = system.config
        if(Hd is None):
            Hd = channel.Hd
        transmitted = assembleTx(system.generator, symbols, system.uw, config)
        received = applyChannel(transmitted, channel, NoiseSpec(sigmaN2), rng=rng)
        corrected = subtractUW(receiveFrequency(received, config), Hd, system.uw, config)
        equalizer = _uwEqualizer(system, scenario.estimator, Hd, sigmaN2)
        estimates = equalizer.apply(corrected)
        CeeDiag = equalizer.CeeDiag

    llrs = softDemap(estimates, CeeDiag, scenario.constellation, sigmaD2)
    if(scenario.rate == "uncoded"):
        decoded = hardDecision(llrs)
    else:
        llrs = deinterleave(llrs, blockSize, bitsPerSymbol)[:codedLength(payload.size, codeSpec)]
        decoded = viterbiDecode(llrs, codeSpec)
    return payload.size, int(np.count_nonzero(decoded != payload))


def _awgnChannel(config):
    return ChannelRealization(h=np.ones(1, dtype=complex), Hd=np.ones(config.Na, dtype=complex), Nu=config.Nu)


def _corpusKey(corpusId):
    return int(hashlib.sha1(corpusId.encode("utf8")).hexdigest()[:8], 16)


def frameSeed(seed, corpusId, esIndex, channelIndex, frameIndex):
    """Seed of one frame, a pure function of its coordinates (independent of run order)."""
    return np.random.SeedSequence([seed, _corpusKey(corpusId), esIndex, channelIndex, frameIndex])


def runBER(scenario, corpus=None, generators=None, showProgress=False):
    """Monte-Carlo BER simulation of one scenario.

    Every Es/N0 point runs frames until ``minErrors`` bit errors were counted
    (and, for a corpus, every channel was used once) or ``maxBits`` payload
    bits were sent. Frames whose channel is rank-deficient for the receiver are
    skipped; a point where a full pass over the channels is skipped stops with
    stopReason "all_skipped" and no bits (NaN BER). Frame randomness is
    derived from (seed, corpus, point, channel, frame) so results do not
    depend on execution order.

    Parameters
    ----------
    scenario : Scenario
    corpus : ChannelCorpus, optional
        In-memory corpus; otherwise loaded from ``scenario.corpusPath``.
    generators : dict, optional
        In-memory generator matrices keyed by system id.
    showProgress : bool

    Returns
    -------
    list of BerRecord
    """
    system = buildSystem(scenario.system, generators, scenario.uwMode, scenario.generatorPath)
    if(scenario.channel == "corpus"):
        if(corpus is None):
            if(scenario.corpusPath is None):
                raise ValueError("A channel corpus (or corpusPath) is required for channel='corpus'")
            corpus = loadChannelCorpus(scenario.corpusPath)
        if(scenario.corpusCount is not None):
            corpus = corpus.head(scenario.corpusCount)
        corpusId = corpus.corpusId
        channelCount = len(corpus)
    else:
        corpusId = "awgn"
        channelCount = 1
    bitsPerSymbol = k_BitsPerSymbol[scenario.constellation]
    codeRate = 1.0 if scenario.rate == "uncoded" else OuterCodeSpec(rate=scenario.rate).rateValue
    estimatorName = "onetap" if scenario.system == "cp-ofdm" else scenario.estimator
    runId = uuid.uuid4().hex[:8]
    channels = {}

    records = []
    points = enumerate(scenario.esn0Grid)
    if(showProgress):
        points = tqdm(list(points), desc=f"BER {scenario.system}/{estimatorName}", leave=False)
    for esIndex, esn0Db in points:
        sigmaN2 = noiseVariance(system, esn0Db)
        bitsSent = 0
        bitErrors = 0
        frameIndex = 0
        skipped = 0
        while(True):
            channelIndex = frameIndex % channelCount
            if(scenario.channel == "corpus"):
                if(channelIndex not in channels):
                    channels[channelIndex] = corpus.realization(channelIndex, system.config)
                channel = channels[channelIndex]
            else:
                channel = _awgnChannel(system.config)
            rng = np.random.default_rng(frameSeed(scenario.seed, corpusId, esIndex, channelIndex, frameIndex))
            try:
                sent, errors = simulateFrame(system, scenario, channel, sigmaN2, rng)
                bitsSent += sent
                bitErrors += errors
            except RankDeficientChannelError:
                skipped += 1
            frameIndex += 1
            if(bitsSent == 0 and skipped >= channelCount):
                stopReason = "all_skipped"
                break
            if(bitsSent >= scenario.maxBits):
                stopReason = "max_bits"
                break
            if(bitErrors >= scenario.minErrors and frameIndex >= channelCount):
                stopReason = "min_errors"
                break
        if(stopReason == "all_skipped"):
            warnings.warn(f"Every channel was rank-deficient at Es/N0={esn0Db} dB; recording no bits (BER is NaN)", UWOFDMDiagnosticWarning, stacklevel=2)
        elif(skipped):
            warnings.warn(f"Skipped {skipped} frames with rank-deficient channels at Es/N0={esn0Db} dB", UWOFDMDiagnosticWarning, stacklevel=2)
        if(stopReason == "max_bits" and bitErrors < scenario.minErrors):
            warnings.warn(f"Es/N0={esn0Db} dB reached the max-bits cap with only {bitErrors} errors", UWOFDMDiagnosticWarning, stacklevel=2)
        records.append(BerRecord(
            systemId=scenario.system,
            estimator=estimatorName,
            outerRate=scenario.rate,
            constellation=scenario.constellation,
            esn0Db=float(esn0Db),
            ebn0Db=float(esn0Db-10*np.log10(bitsPerSymbol*codeRate)),
            bitsSent=int(bitsSent),
            bitErrors=int(bitErrors),
            corpusId=corpusId,
            seed=scenario.seed,
            csi=scenario.csi,
            stopReason=stopReason,
            fingerprint=scenario.fingerprintFor(corpusId),
            runId=runId,
        ))
    return records


def _esn0AtBER(records, targetBER):
    points = sorted((record.esn0Db, record.ber) for record in records if record.bitErrors > 0)
    if(len(points) < 2):
        raise ValueError("At least two points with errors are needed to interpolate a BER curve")
    esn0 = np.array([point[0] for point in points])
    logBER = np.log10([point[1] for point in points])
    if(not (logBER.min() <= np.log10(targetBER) <= logBER.max())):
        raise ValueError(f"Target BER {targetBER:g} is outside the simulated range")
    order = np.argsort(logBER)
    return float(np.interp(np.log10(targetBER), logBER[order], esn0[order]))


def berGapAt(recordsA, recordsB, targetBER=1e-3):
    """Es/N0 gap in dB (curve A minus curve B) at ``targetBER``, by log-linear interpolation.

    A positive gap means curve B reaches the target BER at lower Es/N0.
    """
    return _esn0AtBER(recordsA, targetBER)-_esn0AtBER(recordsB, targetBER)


def _oversampledSpectrum(spectrum, N, oversampling):
    grid = np.zeros(spectrum.shape[:-1]+(N*oversampling,), dtype=complex)
    half = N//2
    grid[..., :half] = spectrum[..., :half]
    grid[..., N*oversampling-(N-half):] = spectrum[..., half:]
    return np.fft.ifft(grid, axis=-1)*oversampling


def _occupiedBandEdge(config):
    offsets = np.where(config.occupiedIndices < config.N//2, config.occupiedIndices, config.occupiedIndices-config.N)
    return float(np.max(np.abs(offsets))*config.fs/config.N)


def runPSD(systemId, nSymbols=1000, uwMode="zero", generators=None, oversampling=4, seed=0, nperseg=None):
    """Welch PSD of a burst of ``nSymbols`` QPSK symbols of one system.

    Symbols are synthesized with an ideal zero-padded IDFT at ``oversampling``
    times the sample rate and no shaping filter. CP-OFDM symbols keep their
    cyclic prefix. UW symbols are cut in the middle of the unique word, which
    every symbol shares with its neighbour as guard.

    The result is normalized to 0 dB at the mean (linear) in-band level, the
    band ending at the outermost occupied subcarrier. This reference does not
    depend on the Welch segment length.

    Returns
    -------
    PsdCurve
        Frequencies in Hz (centered, ascending) and PSD in dB.
    """
    if(nSymbols < 1000):
        warnings.warn(f"PSD estimates from {nSymbols} symbols are noisy, use at least 1000", UWOFDMDiagnosticWarning, stacklevel=2)
    if(uwMode not in k_UWModes):
        raise ValueError(f"uwMode must be one of the following: {', '.join(k_UWModes)}")
    rng = np.random.default_rng(seed)
    system = buildSystem(systemId, generators, uwMode)
    N = system.config.N
    bits = rng.integers(0, 2, nSymbols*system.dataPerSymbol*2)
    symbols = mapQAM(bits, "qpsk", system.config.sigmaD2).reshape(nSymbols, system.dataPerSymbol)
    if(systemId == "cp-ofdm"):
        cpConfig = system.cpConfig
        spectrum = np.zeros((nSymbols, N), dtype=complex)
        spectrum[:, cpConfig.dataIndices] = symbols
        spectrum[:, list(cpConfig.pilotIndices)] = np.array(cpConfig.pilotValues)*np.sqrt(cpConfig.sigmaD2)
        timeSymbols = _oversampledSpectrum(spectrum, N, oversampling)
        prefix = cpConfig.cpLength*oversampling
        timeSymbols = np.concatenate([timeSymbols[:, -prefix:], timeSymbols], axis=1)
    else:
        config = system.config
        spectrum = expandSubcarriers(symbols @ system.generator.mat.T, config)
        if(system.uw is not None):
            spectrum = spectrum+uwFrequency(system.uw, config)
        timeSymbols = np.roll(_oversampledSpectrum(spectrum, N, oversampling), (config.Nu//2)*oversampling, axis=1)
    burst = timeSymbols.ravel()
    sampleRate = system.config.fs*oversampling
    if(nperseg is None):
        nperseg = k_WelchSegmentSymbols*N*oversampling
    frequency, power = scipy.signal.welch(burst, fs=sampleRate, window="hann", nperseg=min(nperseg, burst.size), return_onesided=False)
    frequency = np.fft.fftshift(frequency)
    power = np.fft.fftshift(power)
    inBand = np.abs(frequency) <= _occupiedBandEdge(system.config)
    psdDb = 10*np.log10(np.maximum(power, np.finfo(float).tiny)/np.mean(power[inBand]))
    return PsdCurve(systemId=systemId, frequency=frequency, psdDb=psdDb)


def outOfBandLevel(curve, band=k_SidelobeBand):
    """Mean PSD (dB, linear averaging) over the sidelobe region band[0] <= |f| <= band[1].

    Raises
    ------
    ValueError
        If the curve has no bins in the region (sample rate too low).
    """
    low, high = band
    magnitude = np.abs(curve.frequency)
    mask = (magnitude >= low) & (magnitude <= high)
    if(not np.any(mask)):
        raise ValueError(f"The PSD curve has no bins between {low/1e6:g} and {high/1e6:g} MHz (raise the oversampling)")
    return float(10*np.log10(np.mean(10**(curve.psdDb[mask]/10))))


def inBandRipple(curve, low=1e6, high=7.5e6):
    """Peak-to-peak PSD variation in dB over low <= |f| <= high (DC and band edges excluded)."""
    magnitude = np.abs(curve.frequency)
    mask = (magnitude >= low) & (magnitude <= high)
    return float(np.max(curve.psdDb[mask])-np.min(curve.psdDb[mask]))


def recordsToDataFrame(records):
    columns = list(BerRecord.__dataclass_fields__)
    return pd.DataFrame([asdict(record) for record in records], columns=columns)


def exportResults(records, file):
    """Append BER records to a CSV results store.

    A new (or empty) file gets the ``# uwofdm-results 1`` line and the
    column header first; later calls only append rows.

    Parameters
    ----------
    records : iterable of BerRecord
    file : str or pathlib.Path
    """
    path = Path(file)
    frame = recordsToDataFrame(list(records))
    isNew = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8", newline="") as fileHandle:
        if(isNew):
            fileHandle.write(k_ResultsHeader+"\n")
        frame.to_csv(fileHandle, index=False, header=isNew)


def loadResults(file):
    """Load every record of a results store written by ``exportResults``."""
    path = Path(file)
    if(not path.exists()):
        raise FileNotFoundError(f"Results file {path} does not exist")
    with open(path, "r", encoding="utf-8") as fileHandle:
        firstLine = fileHandle.readline().strip()
    if(firstLine != k_ResultsHeader):
        raise ValueError(f"{path} is not a results file (header {firstLine!r})")
    frame = pd.read_csv(path, skiprows=1, dtype={name: str for name in k_StringColumns}, keep_default_na=False)
    records = []
    for _, row in frame.iterrows():
        records.append(BerRecord(
            systemId=row["systemId"],
            estimator=row["estimator"],
            outerRate=row["outerRate"],
            constellation=row["constellation"],
            esn0Db=float(row["esn0Db"]),
            ebn0Db=float(row["ebn0Db"]),
            bitsSent=int(row["bitsSent"]),
            bitErrors=int(row["bitErrors"]),
            corpusId=row["corpusId"],
            seed=int(row["seed"]),
            csi=row["csi"],
            stopReason=row["stopReason"],
            fingerprint=row["fingerprint"],
            runId=row["runId"],
        ))
    return records


def plotData(records, outputDirectory):
    """Write one TSV curve file (esn0_db, ebn0_db, ber) per scenario fingerprint.

    Records of repeated runs of the same scenario are pooled per Es/N0 point.

    Returns
    -------
    list of pathlib.Path
        The written files.
    """
    outputDirectory = Path(outputDirectory)
    outputDirectory.mkdir(parents=True, exist_ok=True)
    frame = recordsToDataFrame(list(records))
    paths = []
    for fingerprint, group in frame.groupby("fingerprint", sort=True):
        first = group.iloc[0]
        pooled = group.groupby("esn0Db", sort=True).agg(ebn0_db=("ebn0Db", "first"), bits=("bitsSent", "sum"), errors=("bitErrors", "sum"))
        curve = pd.DataFrame({
            "esn0_db": pooled.index.values,
            "ebn0_db": pooled["ebn0_db"].values,
            "ber": pooled["errors"].values/np.where(pooled["bits"].values > 0, pooled["bits"].values, np.nan),
        })
        name = f"{first['systemId']}_{first['estimator']}_{first['outerRate'].replace('/', '-')}_{first['constellation']}_{fingerprint}.tsv"
        path = outputDirectory/name
        curve.to_csv(path, sep="\t", index=False)
        paths.append(path)
    return paths


def savePSD(curve, file):
    """Write a PSD curve as CSV with columns frequency_hz and psd_db."""
    pd.DataFrame({"frequency_hz": curve.frequency, "psd_db": curve.psdDb}).to_csv(file, index=False)


def loadScenarios(file, **defaults):
    """Read scenarios from a csv or tsv file, one scenario per row.

    Allowed columns are "system", "estimator", "rate", "constellation",
    "esn0" (comma separated dB values), "channel", "corpus", "corpuscount",
    "csi", "minerrors", "maxbits", "symbols", "seed", "generator" and
    "uwmode". Missing columns and empty cells take the values given in
    ``defaults`` (Scenario field names) or the Scenario defaults.
    """
    path = Path(file)
    if(not path.exists()):
        raise FileNotFoundError(f"Scenario file {path} does not exist")
    if(path.suffix not in {".csv", ".tsv"}):
        raise ValueError(f"Scenario file {path} must have a .csv or .tsv extension")
    delimiter = "\t" if path.suffix == ".tsv" else ","
    table = pd.read_csv(path, delimiter=delimiter, dtype=str, keep_default_na=False).fillna("")
    unknown = set(table.columns)-set(k_ScenarioColumns)
    if(unknown):
        raise ValueError(f"Unknown scenario columns: {', '.join(sorted(unknown))}")
    for column in k_ScenarioColumns:
        if(column not in table.columns):
            table[column] = ""

    scenarios = []
    for _, row in table.iterrows():
        parameters = dict(defaults)
        for column, (fieldName, converter) in k_ScenarioColumns.items():
            value = row[column].strip()
            if(value):
                parameters[fieldName] = converter(value)
        scenarios.append(Scenario(**parameters))
    return scenarios

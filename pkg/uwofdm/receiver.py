from dataclasses import dataclass
import warnings
import numpy as np
import scipy.linalg

from .ofdmcore import (
    UWOFDMDiagnosticWarning,
    dft,
    idft,
    dftMatrix,
    expandSubcarriers,
    uwFrequency,
)

k_ConditionWarning = 1e12
k_ConditionSingular = 1e15
k_PreambleSeed = 802


class RankDeficientChannelError(ValueError):
    """Raised when H G loses column rank (or the channel has a zero coefficient) and no equalizer exists."""


@dataclass(frozen=True, eq=False)
class Equalizer:
    """Linear data estimator d = E y with the diagonal of its error covariance."""
    E: np.ndarray
    CeeDiag: np.ndarray
    kind: str

    def apply(self, y):
        """Estimates the data symbols of one or many (stacked) corrected receive vectors."""
        return np.asarray(y) @ self.E.T


@dataclass(frozen=True, eq=False)
class Preamble:
    """Two identical BPSK training symbols on the occupied subcarriers."""
    pattern: np.ndarray
    amplitude: float
    timeSymbol: np.ndarray


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    """Impulse-response estimate ``hHat``, smoothed downsized response ``HhatDiag`` and the coarse estimate."""
    hHat: np.ndarray
    HhatDiag: np.ndarray
    coarse: np.ndarray


def _generatorArray(G):
    return np.asarray(getattr(G, "mat", G))


def receiveFrequency(y, config):
    """Downsized frequency-domain receive vector B^T F_N y."""
    return dft(y, config.N)[..., config.occupiedIndices]


def subtractUW(yd, Hd, uw, config):
    """Removes the unique word contribution: y = yd - H B^T F_N [0; uw].

    Parameters
    ----------
    yd : ndarray
        Downsized received frequency vectors, shape (..., Nd+Nr).
    Hd : ndarray
        (Estimated) downsized channel frequency response.
    uw : ndarray or None
        Time-domain unique word of Nu samples. Nothing is subtracted when None.
    config : SystemConfig
    """
    yd = np.asarray(yd)
    if(uw is None):
        return yd
    uwTilde = uwFrequency(uw, config)[..., config.occupiedIndices]
    return yd-np.asarray(Hd)*uwTilde


def _factorizedGram(HG, regularization):
    gram = np.conj(HG.T) @ HG
    if(regularization):
        gram = gram+regularization*np.eye(gram.shape[0])
    condition = np.linalg.cond(gram)
    if(not np.isfinite(condition) or condition > k_ConditionSingular):
        raise RankDeficientChannelError(f"H G is rank deficient (condition number {condition:.3g})")
    if(condition > k_ConditionWarning):
        warnings.warn(f"Ill-conditioned equalizer Gram matrix (condition number {condition:.3g})", UWOFDMDiagnosticWarning, stacklevel=3)
    try:
        factor = scipy.linalg.cho_factor(gram)
    except np.linalg.LinAlgError as error:
        raise RankDeficientChannelError("H G is rank deficient") from error
    return factor


def _linearEqualizer(G, Hd, regularization, noiseScale, kind):
    mat = _generatorArray(G)
    HG = np.asarray(Hd)[:, None]*mat
    factor = _factorizedGram(HG, regularization)
    E = scipy.linalg.cho_solve(factor, np.conj(HG.T))
    inverseDiag = np.real(np.diag(scipy.linalg.cho_solve(factor, np.eye(mat.shape[1]))))
    return Equalizer(E=E, CeeDiag=noiseScale*inverseDiag, kind=kind)


def blueEqualizer(G, Hd, sigmaN2=0.0, N=None):
    """Best linear unbiased estimator E = (G^H H^H H G)^-1 G^H H^H.

    Parameters
    ----------
    G : GeneratorMatrix or ndarray
        Code generator matrix.
    Hd : ndarray
        Downsized channel frequency response (diagonal of H).
    sigmaN2 : float
        Time-domain noise variance. Only used for the error covariance.
    N : int, optional
        DFT length (taken from ``G.config`` when omitted).

    Returns
    -------
    Equalizer
        With CeeDiag = N sigmaN2 diag((G^H H^H H G)^-1).

    Raises
    ------
    RankDeficientChannelError
        If H G does not have full column rank.
    """
    if(N is None):
        N = G.config.N
    return _linearEqualizer(G, Hd, 0.0, N*sigmaN2, "blue")


def lmmseEqualizer(G, Hd, noiseRatio, sigmaD2=None):
    """LMMSE estimator E = (G^H H^H H G + rho I)^-1 G^H H^H with rho = N sigmaN2/sigmaD2.

    The error covariance diagonal is rho sigmaD2 diag((G^H H^H H G + rho I)^-1).
    With ``noiseRatio=0`` the result equals the BLUE.
    """
    if(noiseRatio < 0):
        raise ValueError(f"noiseRatio must be non-negative, got {noiseRatio}")
    if(sigmaD2 is None):
        sigmaD2 = G.config.sigmaD2
    return _linearEqualizer(G, Hd, noiseRatio, noiseRatio*sigmaD2, "lmmse")


def ciEqualizer(Hd, config, sigmaN2=0.0):
    """Channel inversion for the systematic code: E = [I 0] P^T H^-1.

    Only the data subcarriers are equalized; the redundant ones are dropped.
    """
    Hd = np.asarray(Hd)
    HData = Hd[config.dataPositions]
    if(np.any(HData == 0)):
        raise RankDeficientChannelError("Channel inversion impossible: zero channel coefficient on a data subcarrier")
    E = np.zeros((config.Nd, config.Na), dtype=complex)
    E[np.arange(config.Nd), config.dataPositions] = 1.0/HData
    CeeDiag = config.N*sigmaN2/np.abs(HData)**2
    return Equalizer(E=E, CeeDiag=CeeDiag, kind="ci")


def makePreamble(config, energy=None, seed=k_PreambleSeed):
    """Fixed +-1 training pattern on the occupied subcarriers.

    Parameters
    ----------
    config : SystemConfig
    energy : float, optional
        Time-domain energy of one preamble symbol. Amplitude 1 when omitted.
    seed : int
        Seed of the +-1 pattern.
    """
    pattern = 1.0-2.0*np.random.default_rng(seed).integers(0, 2, config.Na)
    amplitude = 1.0 if energy is None else float(np.sqrt(config.N*energy/config.Na))
    timeSymbol = idft(expandSubcarriers(amplitude*pattern, config))
    return Preamble(pattern=pattern, amplitude=amplitude, timeSymbol=timeSymbol)


def _firstColumnsBlock(config):
    return dftMatrix(config.N)[config.occupiedIndices, :config.Nu]


def smoothingMatrix(config):
    """Channel-independent projector W = B^T M1 (M1^H B B^T M1)^-1 M1^H B, M1 the first Nu columns of F_N."""
    BM1 = _firstColumnsBlock(config)
    factor = scipy.linalg.cho_factor(np.conj(BM1.T) @ BM1)
    return BM1 @ scipy.linalg.cho_solve(factor, np.conj(BM1.T))


def estimateChannel(yp1, yp2, preamble, config):
    """Preamble based channel estimate.

    The two received training symbols are averaged and divided by the known
    pattern (coarse estimate). The MVU impulse response estimate is then
    computed from it and mapped back to the occupied subcarriers, which is
    the coarse estimate smoothed with W.

    Returns
    -------
    ChannelEstimate
    """
    yBar = receiveFrequency((np.asarray(yp1)+np.asarray(yp2))/2, config)
    coarse = yBar*preamble.pattern/preamble.amplitude
    BM1 = _firstColumnsBlock(config)
    factor = scipy.linalg.cho_factor(np.conj(BM1.T) @ BM1)
    hHat = scipy.linalg.cho_solve(factor, np.conj(BM1.T) @ coarse)
    return ChannelEstimate(hHat=hHat, HhatDiag=BM1 @ hHat, coarse=coarse)

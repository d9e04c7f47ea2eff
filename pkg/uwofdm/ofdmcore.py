from dataclasses import dataclass
from functools import cached_property
import numpy as np

k_DefaultZeroIndices = (0, 27, 28, 29, 30, 31, 32, 33, 34, 35, 36, 37)
k_DefaultRedundantIndices = (2, 6, 10, 14, 17, 21, 24, 26, 38, 40, 43, 47, 50, 54, 58, 62)

k_ConstraintTolerance = 1e-9


class ConfigurationError(ValueError):
    """Raised when an OFDM layout violates its invariants or leads to a singular construction."""


class UWOFDMDiagnosticWarning(UserWarning):
    """Category for numerical diagnostics that do not stop a computation."""


@dataclass(frozen=True)
class SystemConfig:
    """OFDM dimensions and subcarrier layout.

    Defaults reproduce the WLAN-like setup: N=64, a 16 sample unique word,
    12 zero subcarriers and the energy-optimized set of 16 redundant subcarriers.

    Parameters
    ----------
    N : int
        DFT length in samples.
    Nu : int
        Unique word length in samples. Equals the number of redundant subcarriers.
    zeroIndices : tuple of int
        Indices of the zero subcarriers.
    redundantIndices : tuple of int
        Indices of the redundant subcarriers, disjoint from ``zeroIndices``.
    sigmaD2 : float
        Variance of the QAM data symbols.
    fs : float
        Sample rate in Hz.
    """
    N: int = 64
    Nu: int = 16
    zeroIndices: tuple = k_DefaultZeroIndices
    redundantIndices: tuple = k_DefaultRedundantIndices
    sigmaD2: float = 1.0
    fs: float = 20e6

    def __post_init__(self):
        object.__setattr__(self, "zeroIndices", tuple(sorted(int(k) for k in self.zeroIndices)))
        object.__setattr__(self, "redundantIndices", tuple(sorted(int(k) for k in self.redundantIndices)))
        zeroSet = set(self.zeroIndices)
        redundantSet = set(self.redundantIndices)
        if(self.N <= 0 or self.Nu <= 0 or self.Nu >= self.N):
            raise ConfigurationError(f"Invalid dimensions N={self.N}, Nu={self.Nu}")
        if(len(zeroSet) != len(self.zeroIndices) or len(redundantSet) != len(self.redundantIndices)):
            raise ConfigurationError("Subcarrier index sets must not contain duplicates")
        outside = [k for k in self.zeroIndices+self.redundantIndices if k < 0 or k >= self.N]
        if(outside):
            raise ConfigurationError(f"Subcarrier indices {outside} are outside [0, {self.N-1}]")
        if(zeroSet & redundantSet):
            raise ConfigurationError(f"Redundant subcarriers {sorted(zeroSet & redundantSet)} are also zero subcarriers")
        if(len(self.redundantIndices) != self.Nu):
            raise ConfigurationError(f"Number of redundant subcarriers ({len(self.redundantIndices)}) must equal Nu ({self.Nu})")
        if(self.Nd <= 0):
            raise ConfigurationError(f"No data subcarriers left for N={self.N}, {len(self.zeroIndices)} zero and {self.Nr} redundant subcarriers")
        if(self.sigmaD2 <= 0 or self.fs <= 0):
            raise ConfigurationError("sigmaD2 and fs must be positive")

    @property
    def Nr(self):
        return len(self.redundantIndices)

    @property
    def Nd(self):
        return self.N-self.Nr-len(self.zeroIndices)

    @property
    def Na(self):
        """Number of occupied subcarriers (Nd+Nr)."""
        return self.Nd+self.Nr

    @cached_property
    def occupiedIndices(self):
        zeroSet = set(self.zeroIndices)
        return np.array([k for k in range(self.N) if k not in zeroSet], dtype=int)

    @cached_property
    def dataIndices(self):
        redundantSet = set(self.redundantIndices)
        return np.array([k for k in self.occupiedIndices if k not in redundantSet], dtype=int)

    @cached_property
    def dataPositions(self):
        """Positions of the data subcarriers inside the occupied (downsized) vector.

        Together with ``redundantPositions`` this is the index-mapping form of
        the permutation P: ``c[dataPositions] = d`` and ``c[redundantPositions] = r``.
        """
        return np.searchsorted(self.occupiedIndices, self.dataIndices)

    @cached_property
    def redundantPositions(self):
        return np.searchsorted(self.occupiedIndices, np.array(self.redundantIndices, dtype=int))

    def toDict(self):
        return {
            "N": self.N,
            "Nu": self.Nu,
            "zeroIndices": list(self.zeroIndices),
            "redundantIndices": list(self.redundantIndices),
            "sigmaD2": self.sigmaD2,
            "fs": self.fs,
        }


def singleCarrierConfig(N, Nr, sigmaD2=1.0, fs=20e6):
    """Configuration without zero subcarriers (B = I), used for UW-SC/FDE.

    The redundant index set is only kept to satisfy the configuration
    invariants; it is spread evenly over the band.
    """
    redundantIndices = tuple(int(k) for k in np.round(np.arange(Nr)*N/Nr))
    return SystemConfig(N=N, Nu=Nr, zeroIndices=(), redundantIndices=redundantIndices, sigmaD2=sigmaD2, fs=fs)


def _checkLength(x, N):
    x = np.asarray(x)
    if(N is not None and x.shape[-1] != N):
        raise ValueError(f"Expected vectors of length {N}, got {x.shape[-1]}")
    return x


def dft(x, N=None):
    """Forward DFT with kernel exp(-j 2 pi k l / N) and no scaling, along the last axis."""
    x = _checkLength(x, N)
    return np.fft.fft(x, axis=-1)


def idft(xTilde, N=None):
    """Inverse DFT with kernel (1/N) exp(+j 2 pi k l / N), along the last axis."""
    xTilde = _checkLength(xTilde, N)
    return np.fft.ifft(xTilde, axis=-1)


def dftMatrix(N):
    k = np.arange(N)
    return np.exp(-2j*np.pi*np.outer(k, k)/N)


def idftMatrix(N):
    return np.conj(dftMatrix(N))/N


def selectionMatrix(config):
    """Matrix B (N x (Nd+Nr)) inserting the zero subcarriers."""
    return np.eye(config.N)[:, config.occupiedIndices]


def permutedCodeword(data, redundant, config):
    """Applies P: places data and redundant symbols at their positions of the downsized vector."""
    data = np.asarray(data)
    redundant = np.asarray(redundant)
    codeword = np.zeros(data.shape[:-1]+(config.Na,), dtype=complex)
    codeword[..., config.dataPositions] = data
    codeword[..., config.redundantPositions] = redundant
    return codeword


def expandSubcarriers(downsized, config):
    """Computes B @ downsized along the last axis (zero subcarriers filled in)."""
    downsized = np.asarray(downsized)
    full = np.zeros(downsized.shape[:-1]+(config.N,), dtype=complex)
    full[..., config.occupiedIndices] = downsized
    return full


def uwFrequency(uw, config):
    """Frequency-domain version F_N [0; uw] of the unique word."""
    uw = np.asarray(uw, dtype=complex)
    if(uw.shape[-1] != config.Nu):
        raise ValueError(f"Unique word must have {config.Nu} samples, got {uw.shape[-1]}")
    padded = np.zeros(uw.shape[:-1]+(config.N,), dtype=complex)
    padded[..., config.N-config.Nu:] = uw
    return dft(padded)


def zeroWordResidual(values, config):
    """Relative zero-UW residual of F^-1 B values.

    Parameters
    ----------
    values : ndarray
        Either a (Nd+Nr) x K matrix (e.g. a generator matrix) or a stack of
        downsized frequency-domain vectors with shape (..., Nd+Nr).

    Returns
    -------
    float
        Largest magnitude in the last Nu time samples divided by the RMS of the head samples.
    """
    values = np.asarray(values)
    if(values.ndim == 2 and values.shape[0] == config.Na and values.shape[1] != config.Na):
        values = values.T
    timeDomain = idft(expandSubcarriers(values, config))
    head = timeDomain[..., :config.N-config.Nu]
    tail = timeDomain[..., config.N-config.Nu:]
    headRMS = np.sqrt(np.mean(np.abs(head)**2))
    if(headRMS == 0):
        return 0.0 if np.max(np.abs(tail), initial=0.0) == 0 else np.inf
    return float(np.max(np.abs(tail), initial=0.0)/headRMS)


def _generatorArray(G):
    return np.asarray(getattr(G, "mat", G))


def assembleTx(G, d, uw=None, config=None):
    """Builds transmit symbols x' = F^-1 (B G d + F [0; uw]).

    Parameters
    ----------
    G : GeneratorMatrix or ndarray
        Code generator matrix of size (Nd+Nr) x Nd satisfying the zero-UW constraint.
    d : ndarray
        Data symbols with shape (..., Nd).
    uw : ndarray, optional
        Unique word of Nu samples. Defaults to the zero word.
    config : SystemConfig, optional
        Taken from ``G.config`` when omitted.

    Returns
    -------
    ndarray
        Time-domain symbols with shape (..., N); the last Nu samples equal ``uw``.
    """
    if(config is None):
        config = G.config
    mat = _generatorArray(G)
    d = np.asarray(d)
    if(mat.shape != (config.Na, config.Nd)):
        raise ValueError(f"Generator matrix must be {config.Na}x{config.Nd}, got {mat.shape[0]}x{mat.shape[1]}")
    if(d.shape[-1] != config.Nd):
        raise ValueError(f"Data vectors must have {config.Nd} symbols, got {d.shape[-1]}")
    residual = G.constraintResidual if hasattr(G, "constraintResidual") else zeroWordResidual(mat, config)
    if(residual > k_ConstraintTolerance):
        raise ValueError(f"Generator matrix violates the zero-UW constraint (residual {residual:.3g})")
    x = idft(expandSubcarriers(d @ mat.T, config))
    if(uw is not None):
        uw = np.asarray(uw)
        if(uw.shape[-1] != config.Nu):
            raise ValueError(f"Unique word must have {config.Nu} samples, got {uw.shape[-1]}")
        x[..., config.N-config.Nu:] += uw
    return x


def meanSymbolEnergy(G, config=None, uw=None):
    """Mean energy (sigma_d^2/N) tr(G^H G) + uw^H uw of a transmit symbol."""
    if(config is None):
        config = G.config
    mat = _generatorArray(G)
    energy = config.sigmaD2/config.N*np.real(np.sum(np.abs(mat)**2))
    if(uw is not None):
        energy += np.real(np.vdot(uw, uw))
    return float(energy)


def meanSubcarrierPowers(G, config=None):
    """Mean power of every subcarrier symbol, sigma_d^2 diag(G G^H), zero subcarriers included."""
    if(config is None):
        config = G.config
    mat = _generatorArray(G)
    powers = np.zeros(config.N)
    powers[config.occupiedIndices] = config.sigmaD2*np.sum(np.abs(mat)**2, axis=1)
    return powers

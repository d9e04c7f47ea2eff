from dataclasses import dataclass
from functools import cached_property
import hashlib
import numpy as np
from tqdm.auto import tqdm

from .ofdmcore import SystemConfig

k_DefaultDelaySpread = 100e-9
k_DefaultCorpusSize = 5000


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Sample-spaced impulse response and its downsized frequency response.

    Parameters
    ----------
    h : ndarray
        Complex taps (at most ``Nu`` of them).
    Hd : ndarray
        DFT of the zero-padded taps at the occupied subcarriers.
    Nu : int
        Unique word length the channel must fit in.
    """
    h: np.ndarray
    Hd: np.ndarray
    Nu: int


@dataclass(frozen=True)
class NoiseSpec:
    """Time-domain noise variance per complex sample. In frequency this becomes N sigmaN2 I."""
    sigmaN2: float = 0.0

    def __post_init__(self):
        if(not self.sigmaN2 >= 0):
            raise ValueError(f"sigmaN2 must be non-negative, got {self.sigmaN2}")


@dataclass(frozen=True, eq=False)
class ChannelCorpus:
    """Stored set of impulse responses shared by all simulated systems.

    ``taps`` has one row per realization. Frequency responses are computed
    for a given layout on demand.
    """
    taps: np.ndarray
    delaySpread: float
    fs: float
    Nu: int
    seed: int

    def __len__(self):
        return self.taps.shape[0]

    @cached_property
    def corpusId(self):
        digest = hashlib.sha1(np.ascontiguousarray(self.taps).tobytes()).hexdigest()
        return f"{len(self)}-{self.seed}-{digest[:10]}"

    def realization(self, index, config):
        h = self.taps[index]
        return ChannelRealization(h=h, Hd=toFreq(h, config), Nu=self.Nu)

    def head(self, count):
        """Sub-corpus made of the first ``count`` realizations."""
        if(count > len(self)):
            raise ValueError(f"Corpus only holds {len(self)} realizations, {count} requested")
        return ChannelCorpus(taps=self.taps[:count], delaySpread=self.delaySpread, fs=self.fs, Nu=self.Nu, seed=self.seed)


def powerDelayProfile(delaySpread, fs, taps):
    """Exponential profile exp(-k/(fs tau_rms)) over ``taps`` sample-spaced taps, summing to one."""
    if(not delaySpread > 0):
        raise ValueError(f"delaySpread must be positive, got {delaySpread}")
    profile = np.exp(-np.arange(taps)/(fs*delaySpread))
    return profile/np.sum(profile)


def complexNoise(shape, sigmaN2, rng):
    """Circular complex Gaussian samples with variance sigmaN2."""
    return np.sqrt(sigmaN2/2)*(rng.standard_normal(shape)+1j*rng.standard_normal(shape))


def toFreq(ch, config):
    """Downsized frequency response B^T diag(F_N [h; 0]) B as a vector."""
    h = np.asarray(getattr(ch, "h", ch))
    if(h.shape[-1] > config.N):
        raise ValueError(f"Impulse response longer than N={config.N}")
    return np.fft.fft(h, n=config.N, axis=-1)[..., config.occupiedIndices]


def genMultipath(seed=None, config=None, delaySpread=k_DefaultDelaySpread, maxTaps=None, normalize=True):
    """Draws one indoor multipath channel.

    Every tap is circular complex Gaussian (Rayleigh magnitude, uniform phase)
    with power following the exponential delay profile. Taps beyond ``maxTaps``
    are zero.

    Parameters
    ----------
    seed : int or numpy.random.SeedSequence, optional
        Seed of the realization.
    config : SystemConfig, optional
        Provides fs, Nu and the occupied subcarriers.
    delaySpread : float
        RMS delay spread in seconds (default 100 ns).
    maxTaps : int, optional
        Number of taps, at most Nu (default Nu).
    normalize : bool
        Scale the taps to unit energy.

    Returns
    -------
    ChannelRealization
    """
    if(config is None):
        config = SystemConfig()
    if(maxTaps is None):
        maxTaps = config.Nu
    if(maxTaps < 1 or maxTaps > config.Nu):
        raise ValueError(f"maxTaps must be between 1 and Nu={config.Nu}, got {maxTaps}")
    rng = np.random.default_rng(seed)
    profile = powerDelayProfile(delaySpread, config.fs, maxTaps)
    h = np.sqrt(profile)*complexNoise(maxTaps, 1.0, rng)
    if(normalize):
        h = h/np.linalg.norm(h)
    return ChannelRealization(h=h, Hd=toFreq(h, config), Nu=config.Nu)


def genChannelCorpus(count=k_DefaultCorpusSize, config=None, delaySpread=k_DefaultDelaySpread, seed=0, maxTaps=None, showProgress=False):
    """Generates a reproducible corpus of ``count`` normalized channels.

    Realization i is drawn from SeedSequence([seed, i]), so any prefix of a
    corpus equals the smaller corpus with the same seed.
    """
    if(config is None):
        config = SystemConfig()
    if(maxTaps is None):
        maxTaps = config.Nu
    indices = range(count)
    if(showProgress):
        indices = tqdm(indices, desc="Generating channels", leave=False)
    taps = np.zeros((count, maxTaps), dtype=complex)
    for index in indices:
        realization = genMultipath(np.random.SeedSequence([seed, index]), config, delaySpread, maxTaps)
        taps[index] = realization.h
    return ChannelCorpus(taps=taps, delaySpread=delaySpread, fs=config.fs, Nu=config.Nu, seed=seed)


def applyChannel(x, ch, noise=None, seed=None, rng=None):
    """Cyclic convolution with the channel taps followed by AWGN.

    The convolution is cyclic because the unique word of the previous symbol
    acts as guard interval.

    Parameters
    ----------
    x : ndarray
        Time-domain symbols with shape (..., N).
    ch : ChannelRealization or ndarray
        Channel (or plain tap vector).
    noise : NoiseSpec, optional
        Noise to add. No noise when omitted.
    seed : int, optional
        Seed for the noise when ``rng`` is not given.
    rng : numpy.random.Generator, optional
        Generator to draw the noise from.
    """
    x = np.asarray(x, dtype=complex)
    N = x.shape[-1]
    h = np.asarray(getattr(ch, "h", ch))
    Nu = getattr(ch, "Nu", N)
    if(h.size > Nu):
        raise ValueError(f"Channel has {h.size} taps, more than the unique word length {Nu}")
    if(h.size > N):
        raise ValueError(f"Channel has {h.size} taps, more than the symbol length {N}")
    y = np.fft.ifft(np.fft.fft(x, axis=-1)*np.fft.fft(h, n=N), axis=-1)
    if(noise is not None and noise.sigmaN2 > 0):
        if(rng is None):
            rng = np.random.default_rng(seed)
        y = y+complexNoise(y.shape, noise.sigmaN2, rng)
    return y

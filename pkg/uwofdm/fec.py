from dataclasses import dataclass
from functools import cached_property
import numpy as np

k_PuncturePatterns = {
    "1/2": ((1,), (1,)),
    "3/4": ((1, 1, 0), (1, 0, 1)),
}
k_BitsPerSymbol = {
    "qpsk": 2,
    "16qam": 4,
}
k_MaxInterleaverColumns = 16
k_VarianceFloor = 1e-12

# Gray labels per real dimension: first bit is the sign, second the magnitude.
k_QAM16Levels = np.array([1.0, 3.0, -1.0, -3.0])
k_QAM16Bits = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])


@dataclass(frozen=True)
class OuterCodeSpec:
    """Zero-terminated binary convolutional code (default K=7, generators 133/171 octal).

    Parameters
    ----------
    constraintLength : int
        Constraint length K. Each block gets K-1 zero tail bits.
    generators : tuple of int
        Two generator polynomials in octal notation; the most significant bit taps the current input.
    rate : str
        "1/2" (mother code) or "3/4" (punctured with A:110, B:101).
    """
    constraintLength: int = 7
    generators: tuple = (0o133, 0o171)
    rate: str = "1/2"

    def __post_init__(self):
        if(self.rate not in k_PuncturePatterns):
            raise ValueError(f"rate must be one of the following: {', '.join(k_PuncturePatterns)}")
        if(len(self.generators) != 2):
            raise ValueError("Exactly two generator polynomials are supported")
        if(any(g >= 2**self.constraintLength for g in self.generators)):
            raise ValueError(f"Generator polynomials do not fit constraint length {self.constraintLength}")

    @property
    def tailBits(self):
        return self.constraintLength-1

    @property
    def rateValue(self):
        numerator, denominator = self.rate.split("/")
        return int(numerator)/int(denominator)

    @cached_property
    def taps(self):
        """Tap matrix (2, K): ``taps[j, delay]`` is the coefficient of u[n-delay] in output j."""
        K = self.constraintLength
        return np.array([[(g >> (K-1-delay)) & 1 for delay in range(K)] for g in self.generators], dtype=np.int64)

    @cached_property
    def punctureMask(self):
        return np.array(k_PuncturePatterns[self.rate], dtype=bool).T


def _keptMask(steps, spec):
    mask = spec.punctureMask
    return mask[np.arange(steps) % mask.shape[0]]


def codedLength(numInfoBits, spec):
    """Number of code bits produced for ``numInfoBits`` information bits (tail included)."""
    return int(np.sum(_keptMask(numInfoBits+spec.tailBits, spec)))


def payloadBits(capacity, spec):
    """Largest number of information bits whose coded block fits into ``capacity`` code bits."""
    numInfoBits = max(int(capacity*spec.rateValue)-spec.tailBits, 0)
    while(numInfoBits > 0 and codedLength(numInfoBits, spec) > capacity):
        numInfoBits -= 1
    return numInfoBits


def encode(bits, spec=None):
    """Convolutional encoding with zero tail and optional puncturing.

    Returns
    -------
    ndarray of int8
        Code bits in transmission order (A0 B0 A1 B1 ... with punctured bits removed).
    """
    if(spec is None):
        spec = OuterCodeSpec()
    bits = np.asarray(bits, dtype=np.int64)
    if(bits.ndim != 1 or np.any((bits != 0) & (bits != 1))):
        raise ValueError("Input must be a one dimensional array of bits")
    padded = np.concatenate([bits, np.zeros(spec.tailBits, dtype=np.int64)])
    coded = np.stack([np.convolve(padded, tap)[:padded.size] % 2 for tap in spec.taps], axis=1)
    return coded[_keptMask(padded.size, spec)].astype(np.int8)


@dataclass(frozen=True, eq=False)
class _Trellis:
    previous: np.ndarray
    signs: np.ndarray


def _trellis(spec):
    K = spec.constraintLength
    memory = K-1
    states = 2**memory
    nextStates = np.arange(states)
    previous = np.stack([((nextStates & (states//2-1)) << 1) | x for x in (0, 1)], axis=1)
    inputs = nextStates >> (memory-1)
    signs = np.zeros((states, 2, 2))
    for x in (0, 1):
        history = np.stack([inputs]+[(previous[:, x] >> (memory-delay)) & 1 for delay in range(1, K)], axis=1)
        outputs = (history @ spec.taps.T) % 2
        signs[:, x, :] = 1-2*outputs
    return _Trellis(previous=previous, signs=signs)


def viterbiDecode(llrs, spec=None):
    """Soft-decision Viterbi decoder over the full zero-terminated block.

    Parameters
    ----------
    llrs : array_like
        Log-likelihood ratios of the transmitted code bits (positive favors 0).
    spec : OuterCodeSpec, optional
        Code used by the encoder.

    Returns
    -------
    ndarray of int8
        Maximum-likelihood information bits (tail removed).

    Raises
    ------
    ValueError
        If the number of LLRs does not match any zero-terminated block.
    """
    if(spec is None):
        spec = OuterCodeSpec()
    llrs = np.asarray(llrs, dtype=float)
    keptPerStep = np.sum(spec.punctureMask, axis=1)
    period = spec.punctureMask.shape[0]
    steps = 0
    count = 0
    while(count < llrs.size):
        count += keptPerStep[steps % period]
        steps += 1
    if(count != llrs.size or steps < spec.tailBits):
        raise ValueError(f"{llrs.size} LLRs do not form a terminated block for rate {spec.rate}")

    mask = _keptMask(steps, spec)
    full = np.zeros((steps, 2))
    full[mask] = llrs

    trellis = _trellis(spec)
    states = trellis.previous.shape[0]
    metrics = np.full(states, -np.inf)
    metrics[0] = 0.0
    choices = np.empty((steps, states), dtype=np.int8)
    for step in range(steps):
        candidates = metrics[trellis.previous]+trellis.signs @ full[step]
        choice = np.argmax(candidates, axis=1)
        choices[step] = choice
        metrics = candidates[np.arange(states), choice]

    memory = spec.tailBits
    decoded = np.empty(steps, dtype=np.int8)
    state = 0
    for step in range(steps-1, -1, -1):
        decoded[step] = state >> (memory-1)
        state = trellis.previous[state, choices[step, state]]
    return decoded[:steps-spec.tailBits]


def interleaverPermutation(blockSize, bitsPerSymbol=2, columns=None):
    """Two-step block interleaver permutation for one OFDM symbol of ``blockSize`` code bits.

    The first step writes row-wise and reads column-wise into ``columns``
    columns (by default the largest divisor of the block size up to 16 that
    leaves a row count divisible by the group size). The second step rotates
    bits inside groups of max(bitsPerSymbol/2, 1) so that adjacent bits
    alternate between more and less reliable constellation bits.

    Returns
    -------
    ndarray of int
        ``permutation[k]`` is the output position of input bit k.
    """
    s = max(bitsPerSymbol//2, 1)
    if(columns is None):
        candidates = [c for c in range(1, min(blockSize, k_MaxInterleaverColumns)+1) if blockSize % c == 0 and (blockSize//c) % s == 0]
        if(not candidates):
            raise ValueError(f"No interleaver layout for block size {blockSize} and {bitsPerSymbol} bits per symbol")
        columns = max(candidates)
    if(blockSize % columns):
        raise ValueError(f"Interleaver columns ({columns}) must divide the block size ({blockSize})")
    if((blockSize//columns) % s):
        raise ValueError(f"Interleaver rows ({blockSize//columns}) must be a multiple of {s}")
    k = np.arange(blockSize)
    i = (blockSize//columns)*(k % columns)+k//columns
    return s*(i//s)+(i+blockSize-(columns*i)//blockSize) % s


def interleave(bits, blockSize, bitsPerSymbol=2, columns=None):
    bits = np.asarray(bits)
    if(bits.size % blockSize):
        raise ValueError(f"Bit count {bits.size} is not a multiple of the block size {blockSize}")
    permutation = interleaverPermutation(blockSize, bitsPerSymbol, columns)
    blocks = bits.reshape(-1, blockSize)
    output = np.empty_like(blocks)
    output[:, permutation] = blocks
    return output.ravel()


def deinterleave(values, blockSize, bitsPerSymbol=2, columns=None):
    """Inverse of ``interleave``. Works on bits as well as LLRs."""
    values = np.asarray(values)
    if(values.size % blockSize):
        raise ValueError(f"Length {values.size} is not a multiple of the block size {blockSize}")
    permutation = interleaverPermutation(blockSize, bitsPerSymbol, columns)
    return values.reshape(-1, blockSize)[:, permutation].ravel()


def _bitsPerSymbol(scheme):
    scheme = scheme.lower()
    if(scheme not in k_BitsPerSymbol):
        raise ValueError(f"scheme must be one of the following: {', '.join(k_BitsPerSymbol)}")
    return scheme, k_BitsPerSymbol[scheme]


def mapQAM(bits, scheme="qpsk", sigmaD2=1.0):
    """Gray mapping of bits to QPSK or 16QAM symbols of variance ``sigmaD2``.

    QPSK: bit 0 sets the real part, bit 1 the imaginary part (0 maps to +).
    16QAM: bits 0-1 give the real level, bits 2-3 the imaginary level.
    """
    scheme, bitsPerSymbol = _bitsPerSymbol(scheme)
    bits = np.asarray(bits, dtype=np.int64)
    if(bits.size % bitsPerSymbol):
        raise ValueError(f"Bit count {bits.size} is not a multiple of {bitsPerSymbol}")
    groups = bits.reshape(-1, bitsPerSymbol)
    if(scheme == "qpsk"):
        symbols = (1-2*groups[:, 0])+1j*(1-2*groups[:, 1])
        return symbols*np.sqrt(sigmaD2/2)
    realLevels = k_QAM16Levels[2*groups[:, 0]+groups[:, 1]]
    imagLevels = k_QAM16Levels[2*groups[:, 2]+groups[:, 3]]
    return (realLevels+1j*imagLevels)*np.sqrt(sigmaD2/10)


def _dimensionLLRs(values, variance, levels, labels):
    distances = (values[..., None]-levels)**2
    llrs = []
    for bit in range(labels.shape[1]):
        ones = np.min(distances[..., labels[:, bit] == 1], axis=-1)
        zeros = np.min(distances[..., labels[:, bit] == 0], axis=-1)
        llrs.append((ones-zeros)/variance)
    return llrs


def softDemap(dHat, CeeDiag, scheme="qpsk", sigmaD2=1.0):
    """Max-log LLRs of the bits of every estimated symbol.

    Parameters
    ----------
    dHat : ndarray
        Estimated symbols, shape (..., Nd).
    CeeDiag : ndarray
        Complex error variance of every symbol (broadcast against ``dHat``).
        Infinite variances give zero LLRs; tiny ones are floored.
    scheme : str
        "qpsk" or "16qam".
    sigmaD2 : float
        Symbol variance used by the mapper.

    Returns
    -------
    ndarray
        LLRs in the bit order of ``mapQAM``, flattened.
    """
    scheme, bitsPerSymbol = _bitsPerSymbol(scheme)
    dHat = np.asarray(dHat)
    variance = np.broadcast_to(np.maximum(np.asarray(CeeDiag, dtype=float), k_VarianceFloor*sigmaD2), dHat.shape)
    if(scheme == "qpsk"):
        levels = np.array([1.0, -1.0])*np.sqrt(sigmaD2/2)
        labels = np.array([[0], [1]])
    else:
        levels = k_QAM16Levels*np.sqrt(sigmaD2/10)
        labels = k_QAM16Bits
    with np.errstate(invalid="ignore"):
        llrs = _dimensionLLRs(np.real(dHat), variance, levels, labels)+_dimensionLLRs(np.imag(dHat), variance, levels, labels)
    llrs = np.stack(llrs, axis=-1)
    llrs = np.where(np.isfinite(variance)[..., None], llrs, 0.0)
    return llrs.reshape(-1)


def hardDecision(llrs):
    return (np.asarray(llrs) < 0).astype(np.int8)

import json
import pathlib
import numpy as np

from .ofdmcore import SystemConfig
from .codegen import GeneratorMatrix
from .channel import ChannelCorpus

k_GeneratorHeader = "uwofdm-generator 1"
k_CorpusHeader = "uwofdm-channels 1"
k_ConfigKeys = ["N", "Nu", "zeroIndices", "redundantIndices", "sigmaD2", "fs"]


def _isPath(file):
    return isinstance(file, str) or isinstance(file, pathlib.Path)


def _formatIndices(indices):
    return ",".join(str(int(k)) for k in indices)


def _parseIndices(text):
    text = text.strip()
    if(not text or text == "-"):
        return ()
    return tuple(int(k) for k in text.split(","))


def _formatComplexRow(values):
    return " ".join(f"{float(value.real)!r} {float(value.imag)!r}" for value in values)


def _parseComplexRow(line):
    numbers = np.array([float(token) for token in line.split()])
    return numbers[0::2]+1j*numbers[1::2]


def _readHeader(lines, expectedHeader, terminator):
    first = next(lines, "").strip()
    if(first != expectedHeader):
        raise ValueError(f"Unexpected file header {first!r}, expected {expectedHeader!r}")
    header = {}
    for line in lines:
        line = line.strip()
        if(not line):
            continue
        if(line == terminator):
            return header
        key, _, value = line.partition(" ")
        header[key] = value.strip()
    raise ValueError(f"Missing '{terminator}' section")


def saveGenerator(generator, file):
    """Save a generator matrix to a text file (bit-exact, values written with repr).

    Parameters
    ----------
    generator : GeneratorMatrix
        Matrix to save. The parameter matrix A is stored as well when present.
    file : file, str, or pathlib.Path
        File to save the matrix to.
    """
    config = generator.config
    fileHandle = file
    shouldOpenFile = _isPath(file)
    if(shouldOpenFile):
        fileHandle = open(file, "w", encoding="utf-8")

    try:
        fileHandle.write(k_GeneratorHeader+"\n")
        fileHandle.write(f"kind {generator.kind}\n")
        fileHandle.write(f"N {config.N}\n")
        fileHandle.write(f"Nu {config.Nu}\n")
        fileHandle.write(f"Nd {config.Nd}\n")
        fileHandle.write(f"Nr {config.Nr}\n")
        fileHandle.write(f"sigma_d2 {float(config.sigmaD2)!r}\n")
        fileHandle.write(f"fs {float(config.fs)!r}\n")
        fileHandle.write(f"s2 {'none' if generator.s2 is None else repr(float(generator.s2))}\n")
        fileHandle.write(f"zero_idx {_formatIndices(config.zeroIndices) or '-'}\n")
        fileHandle.write(f"red_idx {_formatIndices(config.redundantIndices)}\n")
        fileHandle.write("data\n")
        for row in generator.mat:
            fileHandle.write(_formatComplexRow(row)+"\n")
        if(generator.A is not None):
            fileHandle.write("parameters\n")
            for row in generator.A:
                fileHandle.write(" ".join(repr(float(value)) for value in row)+"\n")
    finally:
        if(shouldOpenFile):
            fileHandle.close()


def loadGenerator(file):
    """Load a generator matrix saved with ``saveGenerator``.

    Parameters
    ----------
    file : file, str, or pathlib.Path
        File to load the matrix from.

    Returns
    -------
    GeneratorMatrix
    """
    fileHandle = file
    shouldOpenFile = _isPath(file)
    if(shouldOpenFile):
        if(not pathlib.Path(file).exists()):
            raise FileNotFoundError(f"Generator matrix file {file} does not exist")
        fileHandle = open(file, "r", encoding="utf-8")

    try:
        lines = iter(fileHandle)
        header = _readHeader(lines, k_GeneratorHeader, "data")
        config = SystemConfig(
            N=int(header["N"]),
            Nu=int(header["Nu"]),
            zeroIndices=_parseIndices(header["zero_idx"]),
            redundantIndices=_parseIndices(header["red_idx"]),
            sigmaD2=float(header["sigma_d2"]),
            fs=float(header["fs"]),
        )
        if(config.Nd != int(header["Nd"]) or config.Nr != int(header["Nr"])):
            raise ValueError("Generator file dimensions are inconsistent with its index sets")
        rows = []
        parameterRows = []
        target = rows
        for line in lines:
            line = line.strip()
            if(not line):
                continue
            if(line == "parameters"):
                target = parameterRows
                continue
            if(target is rows):
                rows.append(_parseComplexRow(line))
            else:
                parameterRows.append([float(token) for token in line.split()])
    finally:
        if(shouldOpenFile):
            fileHandle.close()

    s2 = None if header["s2"] == "none" else float(header["s2"])
    A = np.array(parameterRows) if parameterRows else None
    return GeneratorMatrix(mat=np.array(rows), kind=header["kind"], config=config, s2=s2, A=A)


def saveChannelCorpus(corpus, file):
    """Save a channel corpus: header (count, tau_rms, fs, Nu, seed) and one line of taps per realization."""
    fileHandle = file
    shouldOpenFile = _isPath(file)
    if(shouldOpenFile):
        fileHandle = open(file, "w", encoding="utf-8")

    try:
        fileHandle.write(k_CorpusHeader+"\n")
        fileHandle.write(f"count {len(corpus)}\n")
        fileHandle.write(f"tau_rms {float(corpus.delaySpread)!r}\n")
        fileHandle.write(f"fs {float(corpus.fs)!r}\n")
        fileHandle.write(f"Nu {corpus.Nu}\n")
        fileHandle.write(f"seed {corpus.seed}\n")
        fileHandle.write("taps\n")
        for taps in corpus.taps:
            fileHandle.write(_formatComplexRow(taps)+"\n")
    finally:
        if(shouldOpenFile):
            fileHandle.close()


def loadChannelCorpus(file):
    """Load a channel corpus saved with ``saveChannelCorpus``.

    Returns
    -------
    ChannelCorpus
    """
    fileHandle = file
    shouldOpenFile = _isPath(file)
    if(shouldOpenFile):
        if(not pathlib.Path(file).exists()):
            raise FileNotFoundError(f"Channel corpus file {file} does not exist")
        fileHandle = open(file, "r", encoding="utf-8")

    try:
        lines = iter(fileHandle)
        header = _readHeader(lines, k_CorpusHeader, "taps")
        rows = [_parseComplexRow(line) for line in lines if line.strip()]
    finally:
        if(shouldOpenFile):
            fileHandle.close()

    count = int(header["count"])
    if(len(rows) != count):
        raise ValueError(f"Channel corpus declares {count} realizations but contains {len(rows)}")
    taps = np.array(rows) if rows else np.zeros((0, int(header["Nu"])), dtype=complex)
    return ChannelCorpus(
        taps=taps,
        delaySpread=float(header["tau_rms"]),
        fs=float(header["fs"]),
        Nu=int(header["Nu"]),
        seed=int(header["seed"]),
    )


def loadSystemConfig(file):
    """Load a SystemConfig from a JSON object. Missing keys take the default values."""
    fileHandle = file
    shouldOpenFile = _isPath(file)
    if(shouldOpenFile):
        if(not pathlib.Path(file).exists()):
            raise FileNotFoundError(f"Configuration file {file} does not exist")
        fileHandle = open(file, "r", encoding="utf-8")

    try:
        values = json.load(fileHandle)
    finally:
        if(shouldOpenFile):
            fileHandle.close()

    unknown = set(values)-set(k_ConfigKeys)
    if(unknown):
        raise ValueError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")
    return SystemConfig(**values)


def saveSystemConfig(config, file):
    fileHandle = file
    shouldOpenFile = _isPath(file)
    if(shouldOpenFile):
        fileHandle = open(file, "w", encoding="utf-8")

    try:
        json.dump(config.toDict(), fileHandle, indent=2)
        fileHandle.write("\n")
    finally:
        if(shouldOpenFile):
            fileHandle.close()


def saveTrace(trace, file):
    """Save a cost trace, one value per line."""
    fileHandle = file
    shouldOpenFile = _isPath(file)
    if(shouldOpenFile):
        fileHandle = open(file, "w", encoding="utf-8")

    try:
        for value in trace:
            fileHandle.write(f"{float(value)!r}\n")
    finally:
        if(shouldOpenFile):
            fileHandle.close()

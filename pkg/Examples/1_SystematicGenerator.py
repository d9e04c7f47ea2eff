import numpy as np
import uwofdm as uw

if __name__ == "__main__":

    config = uw.SystemConfig() # N=64, Nu=16, 12 zero and 16 redundant subcarriers

    generator = uw.systematicGenerator(config)
    print(f"Generator matrix: {generator.mat.shape[0]}x{generator.mat.shape[1]}")
    print(f"Zero-UW residual: {generator.constraintResidual:.2e}")

    # Mean power of every subcarrier (the redundant ones carry more energy than the data ones)
    powers = uw.meanSubcarrierPowers(generator)
    for index in config.redundantIndices:
        print(f"  redundant subcarrier {index:2d}: {powers[index]:.3f}")

    # Transmit a few QPSK symbols with a unique word; the last Nu samples equal the UW
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, 4*config.Nd*2)
    symbols = uw.fec.mapQAM(bits, "qpsk").reshape(4, config.Nd)
    uniqueWord = uw.simkit.chirpUniqueWord(config, energy=0.05)
    x = uw.assembleTx(generator, symbols, uniqueWord)
    print(f"Tail error: {np.max(np.abs(x[:, -config.Nu:]-uniqueWord)):.2e}")

    uw.saveGenerator(generator, "systematic.txt")

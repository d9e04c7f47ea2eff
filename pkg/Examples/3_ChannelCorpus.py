import numpy as np
import uwofdm as uw

if __name__ == "__main__":

    config = uw.SystemConfig()

    # 5000 channels with 100 ns RMS delay spread, reproducible from the seed
    corpus = uw.genChannelCorpus(5000, config, delaySpread=100e-9, seed=1, showProgress=True)
    uw.saveChannelCorpus(corpus, "channels.txt")
    print(f"Saved corpus {corpus.corpusId}")

    # Average power delay profile of the corpus
    profile = np.mean(np.abs(corpus.taps)**2, axis=0)
    for delay, power in enumerate(profile[:6]):
        print(f"  tap {delay}: {power:.4f}")

    # Any prefix of the corpus is the smaller corpus with the same seed
    smaller = uw.genChannelCorpus(500, config, seed=1)
    print(f"Prefix property: {np.array_equal(smaller.taps, corpus.head(500).taps)}")

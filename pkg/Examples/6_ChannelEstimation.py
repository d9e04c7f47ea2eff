import numpy as np
import uwofdm as uw
from uwofdm.receiver import makePreamble
from uwofdm.channel import NoiseSpec

if __name__ == "__main__":

    config = uw.SystemConfig()
    channel = uw.genMultipath(seed=3, config=config)
    preamble = makePreamble(config)

    # The smoothing matrix is a rank-Nu projector
    W = uw.smoothingMatrix(config)
    print(f"Hermitian: {np.allclose(W, W.conj().T)}, idempotent: {np.allclose(W @ W, W)}, rank: {np.linalg.matrix_rank(W)}")

    rng = np.random.default_rng(0)
    for sigmaN2 in [1e-3, 1e-2, 1e-1]:
        noise = NoiseSpec(sigmaN2)
        yp1 = uw.applyChannel(preamble.timeSymbol, channel, noise, rng=rng)
        yp2 = uw.applyChannel(preamble.timeSymbol, channel, noise, rng=rng)
        estimate = uw.estimateChannel(yp1, yp2, preamble, config)
        coarseError = np.mean(np.abs(estimate.coarse-channel.Hd)**2)
        smoothError = np.mean(np.abs(estimate.HhatDiag-channel.Hd)**2)
        print(f"sigma_n^2={sigmaN2:g}: coarse MSE {coarseError:.2e}, smoothed MSE {smoothError:.2e}")

    # BER with estimated channel knowledge
    generators = {"uw-gopt1": uw.loadGenerator("gopt1.txt")}
    corpus = uw.loadChannelCorpus("channels.txt").head(200)
    for csi in ["perfect", "estimated"]:
        scenario = uw.Scenario(system="uw-gopt1", estimator="lmmse", rate="1/2", csi=csi, esn0Grid=(2, 4, 6, 8), channel="corpus")
        records = uw.runBER(scenario, corpus=corpus, generators=generators, showProgress=True)
        print(csi, [f"{record.ber:.2e}" for record in records])

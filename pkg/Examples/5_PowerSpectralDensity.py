import uwofdm as uw
from uwofdm.simkit import savePSD, outOfBandLevel

if __name__ == "__main__":

    generators = {
        "uw-gopt1": uw.loadGenerator("gopt1.txt"),
        "uw-gopt2": uw.loadGenerator("gopt2.txt"),
    }

    for systemId in ["cp-ofdm", "uw-g", "uw-gopt1", "uw-gopt2"]:
        curve = uw.runPSD(systemId, nSymbols=2000, uwMode="zero", generators=generators)
        print(f"{systemId:9s} out-of-band level: {outOfBandLevel(curve):6.1f} dB")
        savePSD(curve, f"psd_{systemId}.csv")

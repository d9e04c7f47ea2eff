import uwofdm as uw

if __name__ == "__main__":

    generators = {"uw-gopt1": uw.loadGenerator("gopt1.txt")} # see 2_OptimizeGenerator.py
    corpus = uw.loadChannelCorpus("channels.txt").head(500) # see 3_ChannelCorpus.py

    scenarios = [
        uw.Scenario(system="cp-ofdm", estimator="onetap", esn0Grid=(0, 4, 8, 12, 16), channel="corpus"),
        uw.Scenario(system="uw-g", estimator="lmmse", esn0Grid=(0, 4, 8, 12, 16), channel="corpus"),
        uw.Scenario(system="uw-gopt1", estimator="lmmse", esn0Grid=(0, 4, 8, 12, 16), channel="corpus"),
        uw.Scenario(system="uw-gopt1", estimator="lmmse", rate="1/2", esn0Grid=(0, 2, 4, 6, 8), channel="corpus"),
    ]

    allRecords = []
    for scenario in scenarios:
        records = uw.runBER(scenario, corpus=corpus, generators=generators, showProgress=True)
        for record in records:
            print(f"{record.systemId:9s} {record.estimator:6s} {record.outerRate:8s} Es/N0={record.esn0Db:5.1f} dB BER={record.ber:.2e}")
        allRecords.extend(records)

    # Results are appended to a CSV store; curve files are written per scenario
    uw.exportResults(allRecords, "results.csv")
    uw.plotData(allRecords, "curves")

#include <doctest.h>

#include <sstream>

#include "alertsift/pipeline.hpp"
#include "alertsift/synth.hpp"

using namespace alertsift;

namespace {

const HomeNet& net() {
    static const HomeNet n = HomeNet::parse("172.16.0.0/16");
    return n;
}

struct Fixture {
    OadModel model;
    Corpus corpus;
    std::vector<AlertRecord> alerts;
    GroundTruth truth;
    CorrelatorConfig config;
};

Fixture make_fixture(std::uint32_t n_benign, std::uint32_t n_attack, std::uint32_t n_bait,
                     std::uint32_t n_dos, std::uint64_t seed = 404) {
    Fixture f;
    CorpusConfig train_config;
    train_config.seed = 9000 + seed;
    train_config.n_benign = 150;
    const Corpus train_corpus = generate_corpus(train_config);
    OadConfig oad_config;
    oad_config.som_width = 4;
    oad_config.som_height = 4;
    oad_config.seed = seed;
    f.model = train_from_capture(train_corpus.output_packets(), net(), oad_config);

    CorpusConfig config;
    config.seed = seed;
    config.n_benign = n_benign;
    config.n_attack = n_attack;
    config.n_bait = n_bait;
    config.n_dos = n_dos;
    f.corpus = generate_corpus(config);
    const std::vector<std::string> patterns{kAttackToken};
    f.alerts = stub_nids(patterns, f.corpus.input_packets(), net());

    std::ostringstream truth_stream;
    write_truth(truth_stream, truth_rows(f.corpus));
    std::istringstream truth_in(truth_stream.str());
    f.truth = load_truth(truth_in, f.corpus.flows.size());

    f.config.out_threshold = default_threshold(f.model);
    return f;
}

std::vector<Packet> outputs(const Fixture& f) { return f.corpus.output_packets(); }

} // namespace

TEST_CASE("bait-only corpus: every verdict is an acquittal") {
    const Fixture f = make_fixture(0, 0, 25, 0);
    const auto verdicts = run_filter(f.model, f.alerts, outputs(f), net(), f.config);
    REQUIRE(verdicts.size() == 25);
    for (const Verdict& v : verdicts) {
        CHECK(v.classification == Classification::FalsePositive);
        CHECK(v.reason == Reason::NoAnomaly);
    }
}

TEST_CASE("dos-only corpus: every verdict is a missing-output conviction") {
    const Fixture f = make_fixture(0, 0, 0, 10);
    const auto verdicts = run_filter(f.model, f.alerts, outputs(f), net(), f.config);
    REQUIRE(verdicts.size() == 10);
    for (const Verdict& v : verdicts) {
        CHECK(v.classification == Classification::TrueIncident);
        CHECK(v.reason == Reason::MissingOutput);
    }
}

TEST_CASE("attack-only corpus: every verdict is an output-anomaly conviction") {
    const Fixture f = make_fixture(0, 10, 0, 0);
    const auto verdicts = run_filter(f.model, f.alerts, outputs(f), net(), f.config);
    REQUIRE(verdicts.size() == 10);
    for (const Verdict& v : verdicts) {
        CHECK(v.classification == Classification::TrueIncident);
        CHECK(v.reason == Reason::OutputAnomaly);
        CHECK(v.score.has_value());
    }
}

TEST_CASE("empty alert feed produces no verdicts") {
    const Fixture f = make_fixture(5, 0, 0, 0);
    CHECK(f.alerts.empty()); // benign flows never alert
    CHECK(run_filter(f.model, f.alerts, outputs(f), net(), f.config).empty());
}

TEST_CASE("verdicts survive a model save/load cycle unchanged") {
    const Fixture f = make_fixture(20, 3, 5, 2);
    std::ostringstream out;
    save_model(f.model, out);
    std::istringstream in(out.str());
    const OadModel reloaded = load_model(in);

    const auto direct = run_filter(f.model, f.alerts, outputs(f), net(), f.config);
    const auto after_reload = run_filter(reloaded, f.alerts, outputs(f), net(), f.config);
    REQUIRE(direct.size() == after_reload.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(direct[i].alarm_id == after_reload[i].alarm_id);
        CHECK(direct[i].classification == after_reload[i].classification);
        CHECK(direct[i].reason == after_reload[i].reason);
        CHECK(direct[i].decided_at == after_reload[i].decided_at);
        CHECK(direct[i].score == after_reload[i].score);
    }
}

TEST_CASE("filter metrics join the synthetic truth without gaps") {
    const Fixture f = make_fixture(30, 4, 6, 2);
    const auto verdicts = run_filter(f.model, f.alerts, outputs(f), net(), f.config);
    const MetricsReport r = compute_metrics(verdicts, f.truth);
    CHECK(r.tp + r.fp + r.fn <= verdicts.size());
    CHECK(r.tp >= 6); // attack + dos flows must convict
    CHECK(r.fn == 0);
    CHECK(r.detection_rate == 1.0);
}

TEST_CASE("threshold zero convicts every alert whose output has any score") {
    const Fixture f = make_fixture(0, 0, 12, 0);
    CorrelatorConfig config = f.config;
    config.out_threshold = 0.0;
    const auto verdicts = run_filter(f.model, f.alerts, outputs(f), net(), config);
    REQUIRE(verdicts.size() == 12);
    for (const Verdict& v : verdicts) {
        CHECK(v.classification == Classification::TrueIncident);
        CHECK(v.reason == Reason::OutputAnomaly);
    }
}

TEST_CASE("sweep at the default threshold equals the plain filter run") {
    const Fixture f = make_fixture(15, 3, 4, 1);
    const std::vector<double> thresholds{default_threshold(f.model)};
    const auto points = run_sweep(f.model, f.alerts, outputs(f), net(), f.config, thresholds,
                                  f.truth);
    REQUIRE(points.size() == 1);
    const auto verdicts = run_filter(f.model, f.alerts, outputs(f), net(), f.config);
    const MetricsReport direct = compute_metrics(verdicts, f.truth);
    CHECK(points[0].report.tp == direct.tp);
    CHECK(points[0].report.fp == direct.fp);
    CHECK(points[0].report.fn == direct.fn);
    CHECK(points[0].report.detection_rate == direct.detection_rate);
}

TEST_CASE("ascending sweep thresholds weakly decrease the conviction counts") {
    const Fixture f = make_fixture(20, 4, 8, 0);
    std::vector<double> thresholds;
    for (int i = 0; i < 8; ++i)
        thresholds.push_back(f.model.t_max * static_cast<double>(i) / 7.0);
    const auto points =
        run_sweep(f.model, f.alerts, outputs(f), net(), f.config, thresholds, f.truth);
    REQUIRE(points.size() == thresholds.size());
    for (std::size_t i = 1; i < points.size(); ++i) {
        CHECK(points[i].output_anomaly_verdicts <= points[i - 1].output_anomaly_verdicts);
        CHECK(points[i].report.fp_rate <= points[i - 1].report.fp_rate);
    }
}

TEST_CASE("sweep csv is stable and carries the three columns") {
    const Fixture f = make_fixture(10, 2, 3, 1);
    const std::vector<double> thresholds{0.0, f.model.t_max};
    const auto points =
        run_sweep(f.model, f.alerts, outputs(f), net(), f.config, thresholds, f.truth);
    const std::string csv = sweep_to_csv(points);
    CHECK(csv.rfind("threshold,detection_rate,fp_rate\n", 0) == 0);
    const auto again =
        run_sweep(f.model, f.alerts, outputs(f), net(), f.config, thresholds, f.truth);
    CHECK(csv == sweep_to_csv(again));
    CHECK_THROWS(run_sweep(f.model, f.alerts, outputs(f), net(), f.config,
                           std::span<const double>{}, f.truth));
}

TEST_CASE("train_from_capture needs outbound payload traffic") {
    std::vector<Packet> inbound_only;
    Packet p;
    p.source = Host{0x0A000002u, 4321};
    p.destination = Host{0xAC100001u, 80};
    p.payload = {1, 2, 3};
    inbound_only.push_back(p);
    CHECK_THROWS(train_from_capture(inbound_only, net(), OadConfig{}));
}

TEST_CASE("verdict jsonl writer round-trips through the parser") {
    const Fixture f = make_fixture(6, 2, 2, 1);
    const auto verdicts = run_filter(f.model, f.alerts, outputs(f), net(), f.config);
    std::ostringstream out;
    for (const Verdict& v : verdicts) out << verdict_to_jsonl(v) << '\n';
    std::istringstream in(out.str());
    const auto parsed = parse_verdicts(in);
    REQUIRE(parsed.size() == verdicts.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].alarm_id == verdicts[i].alarm_id);
        CHECK(parsed[i].classification == verdicts[i].classification);
        CHECK(parsed[i].reason == verdicts[i].reason);
        CHECK(parsed[i].decided_at == verdicts[i].decided_at);
        CHECK(parsed[i].attacker == verdicts[i].attacker);
        CHECK(parsed[i].victim == verdicts[i].victim);
        CHECK(parsed[i].score == verdicts[i].score);
    }
}

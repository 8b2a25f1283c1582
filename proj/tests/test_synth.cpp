#include <doctest.h>

#include <set>
#include <sstream>

#include "alertsift/capture.hpp"
#include "alertsift/oad.hpp"
#include "alertsift/synth.hpp"

using namespace alertsift;

namespace {

const HomeNet& net() {
    static const HomeNet n = HomeNet::parse("172.16.0.0/16");
    return n;
}

std::string serialize(const Corpus& corpus) {
    std::ostringstream out;
    write_packets_jsonl(out, corpus.input_packets());
    out << "--\n";
    write_packets_jsonl(out, corpus.output_packets());
    out << "--\n";
    const auto rows = truth_rows(corpus);
    write_truth(out, rows);
    return out.str();
}

std::vector<std::string> default_patterns() { return {kAttackToken}; }

} // namespace

TEST_CASE("single benign flow") {
    CorpusConfig config;
    config.seed = 3;
    config.n_benign = 1;
    const Corpus corpus = generate_corpus(config);
    REQUIRE(corpus.flows.size() == 1);
    CHECK(corpus.flows[0].kind == FlowKind::Benign);
    CHECK(!corpus.flows[0].responses.empty());
    CHECK(corpus.flows[0].request.destination == config.server);
    const auto rows = truth_rows(corpus);
    REQUIRE(rows.size() == 1);
    CHECK(!rows[0].alarm_expected);
    CHECK(rows[0].disposition == "none");
}

TEST_CASE("same seed, same bytes") {
    CorpusConfig config;
    config.seed = 2026;
    config.n_benign = 40;
    config.n_attack = 3;
    config.n_bait = 5;
    config.n_dos = 2;
    const std::string first = serialize(generate_corpus(config));
    CHECK(first == serialize(generate_corpus(config)));
    CorpusConfig other = config;
    other.seed = 2027;
    CHECK(first != serialize(generate_corpus(other)));
}

TEST_CASE("disposition counts follow the corpus composition") {
    CorpusConfig config;
    config.seed = 11;
    config.n_benign = 100;
    config.n_attack = 5;
    config.n_bait = 10;
    config.n_dos = 2;
    const Corpus corpus = generate_corpus(config);
    const auto rows = truth_rows(corpus);
    std::uint64_t attack_disposition = 0, benign_alert_raising = 0, silent = 0;
    for (const TruthRow& row : rows) {
        if (row.disposition == "attack") ++attack_disposition;
        if (row.alarm_expected && row.disposition == "benign") ++benign_alert_raising;
        if (!row.alarm_expected) ++silent;
    }
    CHECK(attack_disposition == 7);
    CHECK(benign_alert_raising == 10);
    CHECK(silent == 100);
}

TEST_CASE("dos flows never respond, everything else does") {
    CorpusConfig config;
    config.seed = 8;
    config.n_benign = 10;
    config.n_attack = 4;
    config.n_bait = 4;
    config.n_dos = 4;
    const Corpus corpus = generate_corpus(config);
    for (const FlowScript& f : corpus.flows) {
        if (f.kind == FlowKind::Dos)
            CHECK(f.responses.empty());
        else
            CHECK(!f.responses.empty());
    }
}

TEST_CASE("stub nids alerts on exactly the token-bearing inbound requests") {
    CorpusConfig config;
    config.seed = 5;
    config.n_benign = 50;
    config.n_attack = 4;
    config.n_bait = 6;
    config.n_dos = 2;
    const Corpus corpus = generate_corpus(config);
    const auto feed = stub_nids(default_patterns(), corpus.input_packets(), net());
    CHECK(feed.size() == 12);

    std::set<std::string> alerted;
    for (const AlertRecord& r : feed) alerted.insert(mint_alarm_id(r));
    for (const FlowScript& f : corpus.flows) {
        const bool expected = f.kind != FlowKind::Benign;
        CHECK(alerted.count(f.flow_id) == (expected ? 1u : 0u));
    }

    // responses are outbound: the stub must stay silent on them
    CHECK(stub_nids(default_patterns(), corpus.output_packets(), net()).empty());
}

TEST_CASE("stub nids matches any pattern substring") {
    Packet p;
    p.source = Host{0x0A000002u, 4321};
    p.destination = Host{0xAC100001u, 80};
    const std::string payload = "GET /a/../b";
    p.payload.assign(payload.begin(), payload.end());
    const std::vector<Packet> packets{p};
    const std::vector<std::string> patterns{"../"};
    const auto feed = stub_nids(patterns, packets, net());
    REQUIRE(feed.size() == 1);
    CHECK(feed[0].ts == p.timestamp);
    CHECK(!feed[0].magnitude);

    const std::vector<std::string> other{"UNION SELECT"};
    CHECK(stub_nids(other, packets, net()).empty());
    CHECK_THROWS(stub_nids(std::span<const std::string>{}, packets, net()));
}

TEST_CASE("attack output scores far above held-out benign output") {
    for (std::uint64_t seed : {1ull, 7ull, 42ull, 1234ull}) {
        CorpusConfig train_config;
        train_config.seed = seed;
        train_config.n_benign = 120;
        const Corpus train_corpus = generate_corpus(train_config);

        OadConfig oad_config;
        oad_config.som_width = 4;
        oad_config.som_height = 4;
        oad_config.seed = seed;
        const OadModel model = oad_train(train_corpus.output_packets(), oad_config);

        CorpusConfig test_config;
        test_config.seed = seed + 1000;
        test_config.n_benign = 40;
        test_config.n_attack = 10;
        const Corpus test_corpus = generate_corpus(test_config);

        double benign_sum = 0, attack_sum = 0;
        std::uint64_t benign_n = 0, attack_n = 0;
        for (const FlowScript& f : test_corpus.flows) {
            for (const Packet& rsp : f.responses) {
                const double s = oad_score(model, rsp);
                if (f.kind == FlowKind::Attack) {
                    attack_sum += s;
                    ++attack_n;
                } else {
                    benign_sum += s;
                    ++benign_n;
                }
            }
        }
        REQUIRE(benign_n > 0);
        REQUIRE(attack_n > 0);
        CHECK(attack_sum / attack_n > benign_sum / benign_n);
    }
}

TEST_CASE("flow ids line up with the alarm ids the pipeline mints") {
    CorpusConfig config;
    config.seed = 777;
    config.n_bait = 5;
    const Corpus corpus = generate_corpus(config);
    const auto feed = stub_nids(default_patterns(), corpus.input_packets(), net());
    REQUIRE(feed.size() == 5);
    std::set<std::string> flow_ids;
    for (const FlowScript& f : corpus.flows) flow_ids.insert(f.flow_id);
    for (const AlertRecord& r : feed) CHECK(flow_ids.count(mint_alarm_id(r)) == 1);
}

#ifndef ALERTSIFT_SYNTH_HPP
#define ALERTSIFT_SYNTH_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "alertsift/alerts.hpp"
#include "alertsift/traffic.hpp"

namespace alertsift {

enum class FlowKind { Benign, Attack, Bait, Dos };

const char* to_string(FlowKind k);

struct CorpusConfig {
    std::uint64_t seed = 1;
    std::uint32_t n_benign = 0;
    std::uint32_t n_attack = 0;
    std::uint32_t n_bait = 0;
    std::uint32_t n_dos = 0;
    Host server{0xAC100001u, 80}; // 172.16.0.1:80
    std::uint32_t payload_min = 100;
    std::uint32_t payload_max = 1000;
};

// One scripted client-server exchange. Dos flows have no responses.
struct FlowScript {
    std::string flow_id;
    FlowKind kind = FlowKind::Benign;
    Packet request;
    std::vector<Packet> responses;
};

struct Corpus {
    std::vector<FlowScript> flows;

    std::vector<Packet> input_packets() const;  // requests, in time order
    std::vector<Packet> output_packets() const; // responses, in time order
};

// Deterministic corpus: benign flows carry HTTP-ish requests and HTML-ish
// responses; attack, bait and dos requests embed the "UNION SELECT" token;
// attack responses are drawn from a disjoint dumped-table alphabet; bait
// responses look benign; dos flows never answer. Same config, same bytes.
Corpus generate_corpus(const CorpusConfig& config);

// Signature matcher standing in for the input NIDS: one alert (no magnitude)
// per inbound packet whose payload contains any pattern as a substring.
std::vector<AlertRecord> stub_nids(std::span<const std::string> patterns,
                                   std::span<const Packet> packets, const HomeNet& net);

inline const char* kAttackToken = "UNION SELECT";

struct TruthRow {
    std::string flow_id;
    FlowKind kind = FlowKind::Benign;
    bool alarm_expected = false;
    std::string disposition; // "attack" | "benign" | "none"
};

std::vector<TruthRow> truth_rows(const Corpus& corpus);
std::string truth_to_jsonl(const TruthRow& row);
void write_truth(std::ostream& out, std::span<const TruthRow> rows);

} // namespace alertsift

#endif

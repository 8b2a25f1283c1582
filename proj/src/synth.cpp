#include "alertsift/synth.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "alertsift/detrng.hpp"
#include "alertsift/numfmt.hpp"

namespace alertsift {

namespace {

// Response alphabets are disjoint so a benign-trained model separates them.
constexpr std::string_view kBenignAlphabet =
    "abcdefghijklmnopqrstuvwxyzETAONIS <></=\"";
constexpr std::string_view kAttackAlphabet = "0123456789|,;";

constexpr std::string_view kBenignPrefix = "<html><body>";
constexpr std::string_view kBenignSuffix = "</body></html>";

std::string random_word(DetRng& rng, std::size_t min_len, std::size_t max_len) {
    const std::size_t len = rng.range(min_len, max_len);
    std::string word;
    word.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
        word += static_cast<char>('a' + rng.below(26));
    return word;
}

std::vector<std::uint8_t> to_bytes(std::string_view text) {
    return std::vector<std::uint8_t>(text.begin(), text.end());
}

std::vector<std::uint8_t> draw_payload(DetRng& rng, std::string_view alphabet,
                                       std::size_t length) {
    std::vector<std::uint8_t> out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i)
        out.push_back(static_cast<std::uint8_t>(alphabet[rng.below(alphabet.size())]));
    return out;
}

std::string request_text(DetRng& rng, FlowKind kind) {
    std::string path = random_word(rng, 6, 18);
    std::string req = "GET /";
    if (kind == FlowKind::Benign) {
        req += path;
    } else {
        req += "app?start=0 ";
        req += kAttackToken;
        req += ' ';
        req += path;
    }
    req += " HTTP/1.1\r\nHost: ";
    req += random_word(rng, 4, 10);
    req += ".example\r\nUser-Agent: synth/1.0\r\n\r\n";
    return req;
}

} // namespace

const char* to_string(FlowKind k) {
    switch (k) {
    case FlowKind::Benign: return "benign";
    case FlowKind::Attack: return "attack";
    case FlowKind::Bait: return "bait";
    case FlowKind::Dos: return "dos";
    }
    return "?";
}

std::vector<Packet> Corpus::input_packets() const {
    std::vector<Packet> out;
    out.reserve(flows.size());
    for (const FlowScript& f : flows) out.push_back(f.request);
    return out;
}

std::vector<Packet> Corpus::output_packets() const {
    std::vector<Packet> out;
    for (const FlowScript& f : flows)
        out.insert(out.end(), f.responses.begin(), f.responses.end());
    return out;
}

Corpus generate_corpus(const CorpusConfig& config) {
    const std::size_t framing = kBenignPrefix.size() + kBenignSuffix.size();
    if (config.payload_min > config.payload_max ||
        config.payload_max > kMaxPayload - framing)
        throw std::invalid_argument("bad payload length range");
    const std::uint64_t total = static_cast<std::uint64_t>(config.n_benign) + config.n_attack +
                                config.n_bait + config.n_dos;
    if (total > 60000)
        throw std::invalid_argument("corpus too large for unique client ports");

    // deterministic interleaving of flow kinds
    std::vector<FlowKind> kinds;
    kinds.reserve(total);
    kinds.insert(kinds.end(), config.n_benign, FlowKind::Benign);
    kinds.insert(kinds.end(), config.n_attack, FlowKind::Attack);
    kinds.insert(kinds.end(), config.n_bait, FlowKind::Bait);
    kinds.insert(kinds.end(), config.n_dos, FlowKind::Dos);
    DetRng shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    for (std::size_t i = kinds.size(); i > 1; --i)
        std::swap(kinds[i - 1], kinds[shuffle_rng.below(i)]);

    DetRng rng(config.seed);
    Corpus corpus;
    corpus.flows.reserve(total);
    double clock = 1.0;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        FlowScript flow;
        flow.kind = kinds[i];
        const Host client{0x0A000000u | static_cast<Ipv4>(rng.range(1, 0xfffffe)),
                          static_cast<std::uint16_t>(1024 + i)};
        flow.request.source = client;
        flow.request.destination = config.server;
        flow.request.timestamp = clock;
        flow.request.payload = to_bytes(request_text(rng, flow.kind));
        flow.flow_id = format_host(client) + '>' + format_host(config.server);

        if (flow.kind != FlowKind::Dos) {
            const std::uint64_t n_responses = rng.range(1, 3);
            const std::string_view alphabet =
                flow.kind == FlowKind::Attack ? kAttackAlphabet : kBenignAlphabet;
            for (std::uint64_t k = 0; k < n_responses; ++k) {
                Packet rsp;
                rsp.source = config.server;
                rsp.destination = client;
                rsp.timestamp = clock + 0.01 * static_cast<double>(k + 1);
                // Page bodies sit in the top quarter of the length range;
                // benign flows also answer with short status bodies
                // (redirects, error stubs) about a sixth of the time. Short
                // payloads have noisier histograms and score higher, which
                // keeps the training score ceiling well above page scores.
                // Bait flows stay on full pages: their output is normal by
                // definition.
                const std::size_t span = config.payload_max - config.payload_min;
                std::size_t body_len;
                if (flow.kind == FlowKind::Benign && rng.below(6) == 0)
                    body_len = rng.range(config.payload_min, config.payload_min + span / 8);
                else
                    body_len = rng.range(config.payload_max - span / 4, config.payload_max);
                if (flow.kind == FlowKind::Attack) {
                    rsp.payload = draw_payload(rng, alphabet, body_len);
                } else {
                    std::vector<std::uint8_t> body = draw_payload(rng, alphabet, body_len);
                    rsp.payload = to_bytes(kBenignPrefix);
                    rsp.payload.insert(rsp.payload.end(), body.begin(), body.end());
                    const auto suffix = to_bytes(kBenignSuffix);
                    rsp.payload.insert(rsp.payload.end(), suffix.begin(), suffix.end());
                }
                flow.responses.push_back(std::move(rsp));
            }
        }
        corpus.flows.push_back(std::move(flow));
        clock += 0.05;
    }
    return corpus;
}

std::vector<AlertRecord> stub_nids(std::span<const std::string> patterns,
                                   std::span<const Packet> packets, const HomeNet& net) {
    if (patterns.empty())
        throw std::invalid_argument("stub NIDS needs at least one pattern");
    std::vector<AlertRecord> feed;
    for (const Packet& p : packets) {
        if (p.payload.empty() || direction(p, net) != Direction::Inbound) continue;
        const std::string_view payload(reinterpret_cast<const char*>(p.payload.data()),
                                       p.payload.size());
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            if (payload.find(patterns[i]) == std::string_view::npos) continue;
            AlertRecord alert;
            alert.ts = p.timestamp;
            alert.src = p.source;
            alert.dst = p.destination;
            alert.rule_id = "stub-" + std::to_string(i + 1);
            alert.message = "pattern match: " + patterns[i];
            feed.push_back(std::move(alert));
            break; // one alert per packet
        }
    }
    return feed;
}

std::vector<TruthRow> truth_rows(const Corpus& corpus) {
    std::vector<TruthRow> rows;
    rows.reserve(corpus.flows.size());
    for (const FlowScript& f : corpus.flows) {
        TruthRow row;
        row.flow_id = f.flow_id;
        row.kind = f.kind;
        switch (f.kind) {
        case FlowKind::Benign:
            row.alarm_expected = false;
            row.disposition = "none";
            break;
        case FlowKind::Attack:
        case FlowKind::Dos:
            row.alarm_expected = true;
            row.disposition = "attack";
            break;
        case FlowKind::Bait:
            row.alarm_expected = true;
            row.disposition = "benign";
            break;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string truth_to_jsonl(const TruthRow& row) {
    std::string out = "{\"flow_id\":";
    out += nlohmann::json(row.flow_id).dump();
    out += ",\"kind\":\"";
    out += to_string(row.kind);
    out += "\",\"alarm_expected\":";
    out += row.alarm_expected ? "true" : "false";
    out += ",\"disposition\":\"";
    out += row.disposition;
    out += "\"}";
    return out;
}

void write_truth(std::ostream& out, std::span<const TruthRow> rows) {
    for (const TruthRow& row : rows) out << truth_to_jsonl(row) << '\n';
}

} // namespace alertsift

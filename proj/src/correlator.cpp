#include "alertsift/correlator.hpp"

#include <cmath>
#include <istream>

#include <json.hpp>

#include "alertsift/capture.hpp"
#include "alertsift/numfmt.hpp"

namespace alertsift {

const char* to_string(Classification c) {
    return c == Classification::TrueIncident ? "TrueIncident" : "FalsePositive";
}

const char* to_string(Reason r) {
    switch (r) {
    case Reason::OutputAnomaly: return "OutputAnomaly";
    case Reason::MissingOutput: return "MissingOutput";
    case Reason::HighMagnitude: return "HighMagnitude";
    case Reason::RepeatedAlerts: return "RepeatedAlerts";
    case Reason::NoAnomaly: return "NoAnomaly";
    }
    return "?";
}

std::optional<Classification> classification_from_string(std::string_view s) {
    if (s == "TrueIncident") return Classification::TrueIncident;
    if (s == "FalsePositive") return Classification::FalsePositive;
    return std::nullopt;
}

std::optional<Reason> reason_from_string(std::string_view s) {
    if (s == "OutputAnomaly") return Reason::OutputAnomaly;
    if (s == "MissingOutput") return Reason::MissingOutput;
    if (s == "HighMagnitude") return Reason::HighMagnitude;
    if (s == "RepeatedAlerts") return Reason::RepeatedAlerts;
    if (s == "NoAnomaly") return Reason::NoAnomaly;
    return std::nullopt;
}

Correlator::Correlator(HomeNet net, CorrelatorConfig config)
    : net_(std::move(net)), config_(config) {}

std::string Correlator::unique_id(const std::string& wanted) {
    const std::uint32_t uses = ++id_uses_[wanted];
    if (uses == 1) return wanted;
    return wanted + "#" + std::to_string(uses);
}

Verdict Correlator::make_verdict(const Group& g, Classification c, Reason r, double at,
                                 std::optional<double> score) const {
    Verdict v;
    v.alarm_id = g.alarm.id;
    v.classification = c;
    v.reason = r;
    v.decided_at = at;
    v.attacker = g.alarm.attacker;
    v.victim = g.alarm.victim;
    v.score = score;
    return v;
}

void Correlator::decide(Group& g, Classification c, Reason r, double at,
                        std::optional<double> score, std::vector<Verdict>& out) {
    g.decided = true;
    g.verdict = make_verdict(g, c, r, at, score);
    out.push_back(g.verdict);
    for (const std::string& alias : g.alias_ids) {
        Verdict v = g.verdict;
        v.alarm_id = alias;
        out.push_back(std::move(v));
    }
    g.alias_ids.clear();
}

std::vector<Verdict> Correlator::register_alarm(const Alarm& a) {
    std::vector<Verdict> out;
    clock_ = std::max(clock_, a.raised_at);
    if (!net_.contains(a.victim.address) || net_.contains(a.attacker.address)) {
        ++rejected_; // out-of-scope alarm: victim must be inside, attacker outside
        return out;
    }
    const PairKey key{a.attacker, a.victim};
    auto it = groups_.find(key);
    if (it != groups_.end() && a.raised_at - it->second.alarm.raised_at <= config_.timeout) {
        Group& g = it->second;
        const std::string alias = unique_id(a.id);
        if (g.decided) {
            // pair already resolved inside this window: share its verdict
            Verdict v = g.verdict;
            v.alarm_id = alias;
            out.push_back(std::move(v));
        } else {
            g.alarm.counter += 1;
            g.alarm.magnitude = std::max(g.alarm.magnitude, a.magnitude);
            g.alias_ids.push_back(alias);
        }
        return out;
    }
    // stale entry for the pair (only possible if the caller skipped expire)
    if (it != groups_.end() && !it->second.decided) {
        Group& g = it->second;
        if (g.alarm.processed)
            decide(g, Classification::FalsePositive, Reason::NoAnomaly, clock_, std::nullopt, out);
        else
            decide(g, Classification::TrueIncident, Reason::MissingOutput, clock_, std::nullopt, out);
    }
    Group fresh;
    fresh.alarm = a;
    fresh.alarm.id = unique_id(a.id);
    fresh.alarm.processed = false;
    fresh.alarm.true_incident = false;
    fresh.alarm.counter = std::max<std::uint32_t>(a.counter, 1);
    groups_.insert_or_assign(key, std::move(fresh));
    return out;
}

std::vector<Verdict> Correlator::immediate_checks(const Host& attacker, const Host& victim) {
    std::vector<Verdict> out;
    const auto it = groups_.find(PairKey{attacker, victim});
    if (it == groups_.end() || it->second.decided) return out;
    Group& g = it->second;
    if (g.alarm.magnitude > config_.magnitude_threshold) {
        g.alarm.true_incident = true;
        decide(g, Classification::TrueIncident, Reason::HighMagnitude, clock_, std::nullopt, out);
    } else if (g.alarm.counter > config_.raised_threshold) {
        g.alarm.true_incident = true;
        decide(g, Classification::TrueIncident, Reason::RepeatedAlerts, clock_, std::nullopt, out);
    }
    return out;
}

std::vector<Verdict> Correlator::on_alert(const Alarm& a) {
    std::vector<Verdict> out = register_alarm(a);
    std::vector<Verdict> checks = immediate_checks(a.attacker, a.victim);
    out.insert(out.end(), checks.begin(), checks.end());
    return out;
}

std::vector<Verdict> Correlator::process_output_packet(const Packet& p, double score) {
    std::vector<Verdict> out;
    if (direction(p, net_) != Direction::Outbound) return out;
    clock_ = std::max(clock_, p.timestamp);
    const auto it = groups_.find(PairKey{p.destination, p.source});
    if (it == groups_.end() || it->second.decided) return out;
    Group& g = it->second;
    if (!matches_alarm(g.alarm, p)) return out;
    g.alarm.processed = true; // the service answered this communication
    if (!p.payload.empty() && score > config_.out_threshold) {
        g.alarm.true_incident = true;
        decide(g, Classification::TrueIncident, Reason::OutputAnomaly, p.timestamp, score, out);
    }
    return out;
}

std::vector<Verdict> Correlator::expire(double now) {
    std::vector<Verdict> out;
    clock_ = std::max(clock_, now);
    for (auto it = groups_.begin(); it != groups_.end();) {
        Group& g = it->second;
        if (now - g.alarm.raised_at > config_.timeout) {
            if (!g.decided) {
                if (g.alarm.processed)
                    decide(g, Classification::FalsePositive, Reason::NoAnomaly, now, std::nullopt, out);
                else
                    decide(g, Classification::TrueIncident, Reason::MissingOutput, now, std::nullopt, out);
            }
            it = groups_.erase(it); // window over: later alerts start fresh
        } else {
            ++it;
        }
    }
    return out;
}

std::vector<Verdict> Correlator::finalize() {
    std::vector<Verdict> out;
    for (auto& [key, g] : groups_) {
        if (g.decided) continue;
        if (g.alarm.processed)
            decide(g, Classification::FalsePositive, Reason::NoAnomaly, clock_, std::nullopt, out);
        else
            decide(g, Classification::TrueIncident, Reason::MissingOutput, clock_, std::nullopt, out);
    }
    groups_.clear();
    return out;
}

std::size_t Correlator::pending_count() const {
    std::size_t n = 0;
    for (const auto& [key, g] : groups_)
        if (!g.decided) ++n;
    return n;
}

std::string verdict_to_jsonl(const Verdict& v) {
    std::string out = "{\"alarm_id\":";
    out += nlohmann::json(v.alarm_id).dump();
    out += ",\"classification\":\"";
    out += to_string(v.classification);
    out += "\",\"reason\":\"";
    out += to_string(v.reason);
    out += "\",\"decided_at\":";
    out += format_double(v.decided_at);
    out += ",\"attacker\":\"";
    out += format_host(v.attacker);
    out += "\",\"victim\":\"";
    out += format_host(v.victim);
    out += '"';
    if (v.score) {
        out += ",\"score\":";
        out += std::isinf(*v.score) ? "\"inf\"" : format_double(*v.score);
    }
    out += '}';
    return out;
}

std::vector<Verdict> parse_verdicts(std::istream& in) {
    std::vector<Verdict> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        const auto fail = [&] {
            throw FormatError("verdicts: bad record on line " + std::to_string(line_no));
        };
        if (!j.is_object()) fail();
        Verdict v;
        if (!j.contains("alarm_id") || !j["alarm_id"].is_string()) fail();
        v.alarm_id = j["alarm_id"].get<std::string>();
        const auto c = classification_from_string(j.value("classification", ""));
        const auto r = reason_from_string(j.value("reason", ""));
        if (!c || !r) fail();
        v.classification = *c;
        v.reason = *r;
        v.decided_at = j.value("decided_at", 0.0);
        const auto attacker = parse_host(j.value("attacker", ""));
        const auto victim = parse_host(j.value("victim", ""));
        if (!attacker || !victim) fail();
        v.attacker = *attacker;
        v.victim = *victim;
        if (j.contains("score")) {
            if (j["score"].is_string())
                v.score = std::numeric_limits<double>::infinity();
            else
                v.score = j["score"].get<double>();
        }
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace alertsift

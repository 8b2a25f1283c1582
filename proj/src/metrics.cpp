#include "alertsift/metrics.hpp"

#include <fstream>
#include <istream>
#include <set>

#include <json.hpp>

#include "alertsift/capture.hpp"
#include "alertsift/numfmt.hpp"

namespace alertsift {

namespace {

// alias ids carry a "#k" suffix; the instance is the base id
std::string base_id(const std::string& id) {
    const std::size_t hash = id.rfind('#');
    return hash == std::string::npos ? id : id.substr(0, hash);
}

} // namespace

MetricsReport compute_metrics(std::span<const Verdict> verdicts, const GroundTruth& truth) {
    MetricsReport r;
    std::set<std::string> detected_instances;
    for (const Verdict& v : verdicts) {
        const std::string instance = base_id(v.alarm_id);
        const auto it = truth.labels.find(instance);
        if (it == truth.labels.end())
            throw FormatError("verdict id '" + v.alarm_id + "' missing from ground truth");
        const bool attack = it->second == TruthLabel::Attack;
        if (v.classification == Classification::TrueIncident) {
            if (attack) {
                ++r.tp;
                detected_instances.insert(instance);
            } else {
                ++r.fp;
            }
        } else if (attack) {
            ++r.fn;
        }
    }
    if (truth.attack_instances > 0) {
        r.detection_rate = static_cast<double>(detected_instances.size()) /
                           static_cast<double>(truth.attack_instances);
        r.detection_rate_defined = true;
    }
    if (truth.total_packets > 0) {
        r.fp_rate = static_cast<double>(r.fp) / static_cast<double>(truth.total_packets);
        r.fp_rate_defined = true;
    }
    if (r.tp + r.fn > 0) {
        r.completeness = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
        r.completeness_defined = true;
    }
    if (r.tp + r.fp > 0) {
        r.accuracy = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
        r.accuracy_defined = true;
    }
    return r;
}

ReductionSummary compare_reports(const MetricsReport& before, const MetricsReport& after) {
    ReductionSummary s;
    s.fp_before = before.fp;
    s.fp_after = after.fp;
    if (before.fp > 0) {
        s.applicable = true;
        s.fp_reduction = static_cast<double>(before.fp - std::min(after.fp, before.fp)) /
                         static_cast<double>(before.fp);
        if (after.fp > before.fp) // regression: report a negative reduction
            s.fp_reduction = -static_cast<double>(after.fp - before.fp) /
                             static_cast<double>(before.fp);
    }
    s.detection_rate_delta = after.detection_rate - before.detection_rate;
    return s;
}

GroundTruth load_truth(std::istream& in, std::uint64_t total_packets) {
    GroundTruth truth;
    truth.total_packets = total_packets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (!j.is_object() || !j.contains("flow_id") || !j.contains("alarm_expected") ||
            !j.contains("disposition"))
            throw FormatError("truth file: bad record on line " + std::to_string(line_no));
        if (!j["alarm_expected"].get<bool>()) continue;
        const std::string disposition = j["disposition"].get<std::string>();
        const TruthLabel label =
            disposition == "attack" ? TruthLabel::Attack : TruthLabel::Benign;
        truth.labels[j["flow_id"].get<std::string>()] = label;
        if (label == TruthLabel::Attack) ++truth.attack_instances;
    }
    return truth;
}

GroundTruth load_truth_file(const std::string& path, std::uint64_t total_packets) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    return load_truth(in, total_packets);
}

std::string report_to_json(const MetricsReport& r) {
    std::string out = "{\"tp\":" + std::to_string(r.tp);
    out += ",\"fp\":" + std::to_string(r.fp);
    out += ",\"fn\":" + std::to_string(r.fn);
    out += ",\"detection_rate\":" + format_double(r.detection_rate);
    out += ",\"detection_rate_defined\":" + std::string(r.detection_rate_defined ? "true" : "false");
    out += ",\"fp_rate\":" + format_double(r.fp_rate);
    out += ",\"fp_rate_defined\":" + std::string(r.fp_rate_defined ? "true" : "false");
    out += ",\"completeness\":" + format_double(r.completeness);
    out += ",\"completeness_defined\":" + std::string(r.completeness_defined ? "true" : "false");
    out += ",\"accuracy\":" + format_double(r.accuracy);
    out += ",\"accuracy_defined\":" + std::string(r.accuracy_defined ? "true" : "false");
    out += "}";
    return out;
}

MetricsReport report_from_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("metrics report: ") + e.what());
    }
    MetricsReport r;
    r.tp = j.at("tp").get<std::uint64_t>();
    r.fp = j.at("fp").get<std::uint64_t>();
    r.fn = j.at("fn").get<std::uint64_t>();
    r.detection_rate = j.value("detection_rate", 0.0);
    r.detection_rate_defined = j.value("detection_rate_defined", false);
    r.fp_rate = j.value("fp_rate", 0.0);
    r.fp_rate_defined = j.value("fp_rate_defined", false);
    r.completeness = j.value("completeness", 0.0);
    r.completeness_defined = j.value("completeness_defined", false);
    r.accuracy = j.value("accuracy", 0.0);
    r.accuracy_defined = j.value("accuracy_defined", false);
    return r;
}

MetricsReport report_from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    return report_from_json(in);
}

std::string summary_to_json(const ReductionSummary& s) {
    std::string out = "{\"fp_before\":" + std::to_string(s.fp_before);
    out += ",\"fp_after\":" + std::to_string(s.fp_after);
    out += ",\"applicable\":" + std::string(s.applicable ? "true" : "false");
    out += ",\"fp_reduction\":";
    out += s.applicable ? format_double(s.fp_reduction) : std::string("null");
    out += ",\"detection_rate_delta\":" + format_double(s.detection_rate_delta);
    out += "}";
    return out;
}

} // namespace alertsift

#ifndef ALERTSIFT_METRICS_HPP
#define ALERTSIFT_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "alertsift/correlator.hpp"

namespace alertsift {

enum class TruthLabel { Attack, Benign };

// Ground truth for verdict scoring: a label per alarm id plus the packet
// count used as the FP-rate denominator.
struct GroundTruth {
    std::map<std::string, TruthLabel> labels;
    std::uint64_t total_packets = 0;
    std::uint64_t attack_instances = 0;
};

struct MetricsReport {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    double detection_rate = 0.0;
    double fp_rate = 0.0;
    double completeness = 0.0;
    double accuracy = 0.0;
    // zero-denominator rates are reported as 0 and flagged undefined
    bool detection_rate_defined = false;
    bool fp_rate_defined = false;
    bool completeness_defined = false;
    bool accuracy_defined = false;
};

// Counts TrueIncident/FalsePositive verdicts against the truth labels.
// Throws on a verdict id the truth does not cover. Alias ids ("...#k") are
// looked up and grouped under their base id.
MetricsReport compute_metrics(std::span<const Verdict> verdicts, const GroundTruth& truth);

struct ReductionSummary {
    std::uint64_t fp_before = 0;
    std::uint64_t fp_after = 0;
    double fp_reduction = 0.0; // fraction of before.fp removed
    bool applicable = false;   // false when before.fp == 0
    double detection_rate_delta = 0.0;
};

ReductionSummary compare_reports(const MetricsReport& before, const MetricsReport& after);

// Truth file rows: {"flow_id":...,"kind":...,"alarm_expected":...,"disposition":...}
GroundTruth load_truth(std::istream& in, std::uint64_t total_packets);
GroundTruth load_truth_file(const std::string& path, std::uint64_t total_packets);

std::string report_to_json(const MetricsReport& r);
MetricsReport report_from_json(std::istream& in);
MetricsReport report_from_json_file(const std::string& path);

std::string summary_to_json(const ReductionSummary& s);

} // namespace alertsift

#endif

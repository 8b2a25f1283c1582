#ifndef ALERTSIFT_PIPELINE_HPP
#define ALERTSIFT_PIPELINE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alertsift/alerts.hpp"
#include "alertsift/correlator.hpp"
#include "alertsift/metrics.hpp"
#include "alertsift/oad.hpp"
#include "alertsift/traffic.hpp"

namespace alertsift {

struct FilterStats {
    std::size_t alerts_skipped = 0;  // alerts that never became alarms
    std::size_t alarms_rejected = 0; // rejected by the correlator
};

// Output packet with its precomputed anomaly score. scored is false for
// empty payloads (and for packets that are not outbound, which are dropped
// before this stage).
struct ScoredPacket {
    Packet packet;
    double score = 0.0;
    bool scored = false;
};

std::vector<ScoredPacket> score_outbound(const OadModel& model, std::span<const Packet> packets,
                                         const HomeNet& net);

// Merge alerts and scored output packets by timestamp (ties: alerts first),
// drive the correlator, and return every verdict in emission order.
std::vector<Verdict> run_filter_scored(std::span<const AlertRecord> alerts,
                                       std::span<const ScoredPacket> scored, const HomeNet& net,
                                       const CorrelatorConfig& config,
                                       FilterStats* stats = nullptr);

std::vector<Verdict> run_filter(const OadModel& model, std::span<const AlertRecord> alerts,
                                std::span<const Packet> packets, const HomeNet& net,
                                const CorrelatorConfig& config, FilterStats* stats = nullptr);

// Keeps outbound packets with non-empty payloads and fits the model.
// Throws when nothing is left to train on.
OadModel train_from_capture(std::span<const Packet> packets, const HomeNet& net,
                            const OadConfig& config);

struct SweepPoint {
    double threshold = 0.0;
    MetricsReport report;
    std::uint64_t output_anomaly_verdicts = 0;
};

// Rerun the filter stage once per threshold against a fixed model; packets
// are scored once and reused.
std::vector<SweepPoint> run_sweep(const OadModel& model, std::span<const AlertRecord> alerts,
                                  std::span<const Packet> packets, const HomeNet& net,
                                  const CorrelatorConfig& base_config,
                                  std::span<const double> thresholds, const GroundTruth& truth);

// CSV with header "threshold,detection_rate,fp_rate", one row per point.
std::string sweep_to_csv(std::span<const SweepPoint> points);

} // namespace alertsift

#endif

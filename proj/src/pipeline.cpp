#include "alertsift/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "alertsift/numfmt.hpp"

namespace alertsift {

std::vector<ScoredPacket> score_outbound(const OadModel& model, std::span<const Packet> packets,
                                         const HomeNet& net) {
    std::vector<ScoredPacket> out;
    for (const Packet& p : packets) {
        if (direction(p, net) != Direction::Outbound) continue;
        ScoredPacket sp;
        sp.packet = p;
        if (!p.payload.empty()) {
            sp.score = oad_score(model, p);
            sp.scored = true;
        }
        out.push_back(std::move(sp));
    }
    return out;
}

std::vector<Verdict> run_filter_scored(std::span<const AlertRecord> alerts,
                                       std::span<const ScoredPacket> scored, const HomeNet& net,
                                       const CorrelatorConfig& config, FilterStats* stats) {
    struct Event {
        double ts;
        int kind; // 0 = alert, 1 = packet; alerts win timestamp ties
        std::size_t index;
    };
    std::vector<Event> events;
    events.reserve(alerts.size() + scored.size());
    for (std::size_t i = 0; i < alerts.size(); ++i) events.push_back({alerts[i].ts, 0, i});
    for (std::size_t i = 0; i < scored.size(); ++i)
        events.push_back({scored[i].packet.timestamp, 1, i});
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        return a.kind < b.kind;
    });

    Correlator correlator(net, config);
    FilterStats local;
    std::vector<Verdict> verdicts;
    const auto append = [&verdicts](std::vector<Verdict>&& v) {
        verdicts.insert(verdicts.end(), std::make_move_iterator(v.begin()),
                        std::make_move_iterator(v.end()));
    };
    for (const Event& ev : events) {
        append(correlator.expire(ev.ts));
        if (ev.kind == 0) {
            const auto alarm = to_alarm(alerts[ev.index], net);
            if (!alarm) {
                ++local.alerts_skipped;
                continue;
            }
            append(correlator.on_alert(*alarm));
        } else {
            const ScoredPacket& sp = scored[ev.index];
            append(correlator.process_output_packet(sp.packet, sp.score));
        }
    }
    append(correlator.finalize());
    local.alarms_rejected = correlator.rejected();
    if (stats) *stats = local;
    return verdicts;
}

std::vector<Verdict> run_filter(const OadModel& model, std::span<const AlertRecord> alerts,
                                std::span<const Packet> packets, const HomeNet& net,
                                const CorrelatorConfig& config, FilterStats* stats) {
    const std::vector<ScoredPacket> scored = score_outbound(model, packets, net);
    return run_filter_scored(alerts, scored, net, config, stats);
}

OadModel train_from_capture(std::span<const Packet> packets, const HomeNet& net,
                            const OadConfig& config) {
    std::vector<Packet> training;
    for (const Packet& p : packets)
        if (direction(p, net) == Direction::Outbound && !p.payload.empty())
            training.push_back(p);
    if (training.empty())
        throw std::invalid_argument("no outbound packets with payload to train on");
    return oad_train(training, config);
}

std::vector<SweepPoint> run_sweep(const OadModel& model, std::span<const AlertRecord> alerts,
                                  std::span<const Packet> packets, const HomeNet& net,
                                  const CorrelatorConfig& base_config,
                                  std::span<const double> thresholds, const GroundTruth& truth) {
    if (thresholds.empty())
        throw std::invalid_argument("threshold sweep needs at least one point");
    const std::vector<ScoredPacket> scored = score_outbound(model, packets, net);
    std::vector<SweepPoint> points;
    points.reserve(thresholds.size());
    for (double threshold : thresholds) {
        CorrelatorConfig config = base_config;
        config.out_threshold = threshold;
        const std::vector<Verdict> verdicts = run_filter_scored(alerts, scored, net, config);
        SweepPoint point;
        point.threshold = threshold;
        point.report = compute_metrics(verdicts, truth);
        for (const Verdict& v : verdicts)
            if (v.reason == Reason::OutputAnomaly) ++point.output_anomaly_verdicts;
        points.push_back(std::move(point));
    }
    return points;
}

std::string sweep_to_csv(std::span<const SweepPoint> points) {
    std::string csv = "threshold,detection_rate,fp_rate\n";
    for (const SweepPoint& p : points) {
        csv += format_double(p.threshold);
        csv += ',';
        csv += format_double(p.report.detection_rate);
        csv += ',';
        csv += format_double(p.report.fp_rate);
        csv += '\n';
    }
    return csv;
}

} // namespace alertsift

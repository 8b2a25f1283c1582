#ifndef ALERTSIFT_CORRELATOR_HPP
#define ALERTSIFT_CORRELATOR_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alertsift/alarm.hpp"
#include "alertsift/traffic.hpp"

namespace alertsift {

enum class Classification { TrueIncident, FalsePositive };
enum class Reason { OutputAnomaly, MissingOutput, HighMagnitude, RepeatedAlerts, NoAnomaly };

const char* to_string(Classification c);
const char* to_string(Reason r);
std::optional<Classification> classification_from_string(std::string_view s);
std::optional<Reason> reason_from_string(std::string_view s);

struct Verdict {
    std::string alarm_id;
    Classification classification = Classification::FalsePositive;
    Reason reason = Reason::NoAnomaly;
    double decided_at = 0.0;
    Host attacker;
    Host victim;
    std::optional<double> score; // present when reason == OutputAnomaly
};

struct CorrelatorConfig {
    double out_threshold = 0.0;
    // finite "disabled" sentinel: no real magnitude exceeds it
    double magnitude_threshold = std::numeric_limits<double>::max();
    std::uint32_t raised_threshold = 3;
    double timeout = 30.0;
};

// Tracks pre-alarms per (attacker, victim) pair, consumes scored output
// packets, and resolves every alarm exactly once:
//
//   - a matching output packet above out_threshold convicts (OutputAnomaly);
//   - magnitude above magnitude_threshold convicts at registration
//     (HighMagnitude), as does the duplicate-alert counter passing
//     raised_threshold (RepeatedAlerts);
//   - at expiry, an alarm that never saw output is convicted
//     (MissingOutput) and one whose output stayed quiet is acquitted
//     (FalsePositive / NoAnomaly).
//
// Repeated alerts for the same pair inside the timeout window fold into one
// alarm: the counter is bumped, the magnitude keeps the maximum seen, and the
// extra ids become aliases that share the pair's verdict (including a verdict
// already emitted). Time comes from event timestamps only.
//
// Single-writer: feed it one merged, timestamp-ordered event stream.
class Correlator {
public:
    Correlator(HomeNet net, CorrelatorConfig config);

    // Queue a pre-alarm (or fold it into the pair's live alarm). Alarms whose
    // victim is outside the home net (or attacker inside) are rejected and
    // counted. May emit alias verdicts when the pair is already decided.
    std::vector<Verdict> register_alarm(const Alarm& a);

    // Magnitude and repeat-count checks for the pair's pending alarm.
    std::vector<Verdict> immediate_checks(const Host& attacker, const Host& victim);

    // register_alarm followed by immediate_checks.
    std::vector<Verdict> on_alert(const Alarm& a);

    // Feed one output packet with its anomaly score. Non-outbound packets are
    // ignored. Empty payloads mark the communication as answered without an
    // anomaly test (score is ignored).
    std::vector<Verdict> process_output_packet(const Packet& p, double score);

    // Resolve every pending alarm older than the timeout.
    std::vector<Verdict> expire(double now);

    // End of stream: resolve everything still pending.
    std::vector<Verdict> finalize();

    double clock() const { return clock_; }
    std::size_t pending_count() const;
    std::size_t rejected() const { return rejected_; }

    const CorrelatorConfig& config() const { return config_; }

private:
    struct Group {
        Alarm alarm;                        // primary record; counter/magnitude fold here
        std::vector<std::string> alias_ids; // later ids sharing the verdict
        bool decided = false;
        Verdict verdict;                    // template once decided
    };

    using PairKey = std::pair<Host, Host>; // (attacker, victim)

    Verdict make_verdict(const Group& g, Classification c, Reason r, double at,
                         std::optional<double> score) const;
    void decide(Group& g, Classification c, Reason r, double at, std::optional<double> score,
                std::vector<Verdict>& out);
    std::string unique_id(const std::string& wanted);

    HomeNet net_;
    CorrelatorConfig config_;
    std::map<PairKey, Group> groups_; // ordered: deterministic sweep order
    std::map<std::string, std::uint32_t> id_uses_;
    double clock_ = 0.0;
    std::size_t rejected_ = 0;
};

std::string verdict_to_jsonl(const Verdict& v);
std::vector<Verdict> parse_verdicts(std::istream& in);

} // namespace alertsift

#endif

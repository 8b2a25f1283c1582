#ifndef ALERTSIFT_ALERTS_HPP
#define ALERTSIFT_ALERTS_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alertsift/alarm.hpp"
#include "alertsift/traffic.hpp"

namespace alertsift {

// One input-NIDS alert. magnitude is absent for signature-based feeds.
struct AlertRecord {
    double ts = 0.0;
    Host src;
    Host dst;
    std::optional<double> magnitude;
    std::string rule_id;
    std::string message;
};

// Parses a feed of JSON-lines alerts and/or classic one-line fast alerts
// ("MM/DD-HH:MM:SS.ffffff [**] [id] msg [**] {TCP} a.b.c.d:p -> e.f.g.h:q");
// the two may be mixed line by line. Malformed lines are skipped and counted.
std::vector<AlertRecord> parse_alert_feed(std::istream& in, std::size_t* skipped = nullptr);
std::vector<AlertRecord> parse_alert_file(const std::string& path, std::size_t* skipped = nullptr);

std::string alert_to_jsonl(const AlertRecord& r);
void write_alert_feed(std::ostream& out, std::span<const AlertRecord> records);

// Stable alarm identifier derived from the alert 4-tuple.
std::string mint_alarm_id(const AlertRecord& r);

// Alarm for an inbound alert; nullopt (skip) when the destination is outside
// the home net or the source inside it.
std::optional<Alarm> to_alarm(const AlertRecord& r, const HomeNet& net);

} // namespace alertsift

#endif

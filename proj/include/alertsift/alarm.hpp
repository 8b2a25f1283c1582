#ifndef ALERTSIFT_ALARM_HPP
#define ALERTSIFT_ALARM_HPP

#include <cstdint>
#include <limits>
#include <string>

#include "alertsift/traffic.hpp"

namespace alertsift {

// A pre-alarm from the input NIDS. magnitude is -infinity for
// signature-based feeds, which never trips the magnitude check.
struct Alarm {
    std::string id;
    double magnitude = -std::numeric_limits<double>::infinity();
    Host attacker;
    Host victim;
    double raised_at = 0.0;
    bool processed = false;
    bool true_incident = false;
    std::uint32_t counter = 1;
};

// True iff p is the exact reverse of the alert 4-tuple: victim answering the
// attacker on the same ports.
inline bool matches_alarm(const Alarm& a, const Packet& p) {
    return p.source == a.victim && p.destination == a.attacker;
}

} // namespace alertsift

#endif

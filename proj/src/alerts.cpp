#include "alertsift/alerts.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "alertsift/capture.hpp"
#include "alertsift/numfmt.hpp"

namespace alertsift {

namespace {

// days before the start of each month in a non-leap year
constexpr int kMonthStart[12] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};

bool parse_json_alert(const std::string& line, AlertRecord& out) {
    const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_object()) return false;
    if (!j.contains("ts") || !j["ts"].is_number()) return false;
    const double ts = j["ts"].get<double>();
    if (!std::isfinite(ts) || ts < 0) return false;
    if (!j.contains("src") || !j["src"].is_string()) return false;
    if (!j.contains("dst") || !j["dst"].is_string()) return false;
    const auto src = parse_ipv4(j["src"].get<std::string>());
    const auto dst = parse_ipv4(j["dst"].get<std::string>());
    if (!src || !dst) return false;
    if (!j.contains("sport") || !j["sport"].is_number_integer()) return false;
    if (!j.contains("dport") || !j["dport"].is_number_integer()) return false;
    const std::int64_t sport = j["sport"].get<std::int64_t>();
    const std::int64_t dport = j["dport"].get<std::int64_t>();
    if (sport < 0 || sport > 65535 || dport < 0 || dport > 65535) return false;
    out.ts = ts;
    out.src = Host{*src, static_cast<std::uint16_t>(sport)};
    out.dst = Host{*dst, static_cast<std::uint16_t>(dport)};
    out.rule_id = j.value("rule_id", "");
    out.message = j.value("msg", "");
    out.magnitude.reset();
    if (j.contains("magnitude")) {
        if (!j["magnitude"].is_number()) return false;
        const double m = j["magnitude"].get<double>();
        if (!std::isfinite(m)) return false;
        out.magnitude = m;
    }
    return true;
}

bool take(std::string_view& s, std::string_view token) {
    if (s.substr(0, token.size()) != token) return false;
    s.remove_prefix(token.size());
    return true;
}

bool take_digits(std::string_view& s, std::size_t count, int& out) {
    if (s.size() < count) return false;
    int v = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    s.remove_prefix(count);
    out = v;
    return true;
}

// The fast format has no year; timestamps are anchored to a non-leap 1970 so
// the feed stays internally ordered and deterministic.
bool parse_fast_alert(const std::string& line, AlertRecord& out) {
    std::string_view s = line;
    int month, day, hour, minute, second;
    if (!take_digits(s, 2, month) || !take(s, "/") || !take_digits(s, 2, day) ||
        !take(s, "-") || !take_digits(s, 2, hour) || !take(s, ":") ||
        !take_digits(s, 2, minute) || !take(s, ":") || !take_digits(s, 2, second))
        return false;
    if (month < 1 || month > 12 || day < 1 || day > 31) return false;
    if (hour > 23 || minute > 59 || second > 60) return false;
    double fraction = 0.0;
    if (take(s, ".")) {
        double scale = 0.1;
        bool any = false;
        while (!s.empty() && s.front() >= '0' && s.front() <= '9') {
            fraction += (s.front() - '0') * scale;
            scale *= 0.1;
            s.remove_prefix(1);
            any = true;
        }
        if (!any) return false;
    }
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (!take(s, "[**]")) return false;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (!take(s, "[")) return false;
    const std::size_t id_end = s.find(']');
    if (id_end == std::string_view::npos) return false;
    out.rule_id = std::string(s.substr(0, id_end));
    s.remove_prefix(id_end + 1);
    const std::size_t msg_end = s.find("[**]");
    if (msg_end == std::string_view::npos) return false;
    std::string_view msg = s.substr(0, msg_end);
    while (!msg.empty() && msg.front() == ' ') msg.remove_prefix(1);
    while (!msg.empty() && msg.back() == ' ') msg.remove_suffix(1);
    out.message = std::string(msg);
    s.remove_prefix(msg_end + 4);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (!take(s, "{TCP}")) return false;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    const std::size_t arrow = s.find(" -> ");
    if (arrow == std::string_view::npos) return false;
    const auto src = parse_host(s.substr(0, arrow));
    std::string_view rest = s.substr(arrow + 4);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t')) rest.remove_suffix(1);
    const auto dst = parse_host(rest);
    if (!src || !dst) return false;
    out.src = *src;
    out.dst = *dst;
    const int day_of_year = kMonthStart[month - 1] + (day - 1);
    out.ts = ((day_of_year * 24.0 + hour) * 60.0 + minute) * 60.0 + second + fraction;
    out.magnitude.reset();
    return true;
}

} // namespace

std::vector<AlertRecord> parse_alert_feed(std::istream& in, std::size_t* skipped) {
    std::vector<AlertRecord> out;
    std::size_t bad = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char c : line)
            if (c != ' ' && c != '\t') { blank = false; break; }
        if (blank) continue;
        AlertRecord r;
        const bool ok = line.front() == '{' ? parse_json_alert(line, r) : parse_fast_alert(line, r);
        if (ok)
            out.push_back(std::move(r));
        else
            ++bad;
    }
    if (skipped) *skipped = bad;
    return out;
}

std::vector<AlertRecord> parse_alert_file(const std::string& path, std::size_t* skipped) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    return parse_alert_feed(in, skipped);
}

std::string alert_to_jsonl(const AlertRecord& r) {
    std::string out = "{\"ts\":";
    out += format_double(r.ts);
    out += ",\"src\":\"";
    out += format_ipv4(r.src.address);
    out += "\",\"sport\":";
    out += std::to_string(r.src.port);
    out += ",\"dst\":\"";
    out += format_ipv4(r.dst.address);
    out += "\",\"dport\":";
    out += std::to_string(r.dst.port);
    out += ",\"rule_id\":";
    out += nlohmann::json(r.rule_id).dump();
    out += ",\"msg\":";
    out += nlohmann::json(r.message).dump();
    if (r.magnitude) {
        out += ",\"magnitude\":";
        out += format_double(*r.magnitude);
    }
    out += '}';
    return out;
}

void write_alert_feed(std::ostream& out, std::span<const AlertRecord> records) {
    for (const AlertRecord& r : records) out << alert_to_jsonl(r) << '\n';
}

std::string mint_alarm_id(const AlertRecord& r) {
    return format_host(r.src) + '>' + format_host(r.dst);
}

std::optional<Alarm> to_alarm(const AlertRecord& r, const HomeNet& net) {
    if (!net.contains(r.dst.address) || net.contains(r.src.address))
        return std::nullopt; // not an attack against the monitored network
    Alarm a;
    a.id = mint_alarm_id(r);
    a.magnitude = r.magnitude ? *r.magnitude : -std::numeric_limits<double>::infinity();
    a.attacker = r.src;
    a.victim = r.dst;
    a.raised_at = r.ts;
    a.processed = false;
    a.true_incident = false;
    a.counter = 1;
    return a;
}

} // namespace alertsift

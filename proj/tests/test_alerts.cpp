#include <doctest.h>

#include <sstream>

#include "alertsift/alerts.hpp"
#include "alertsift/detrng.hpp"

using namespace alertsift;

namespace {

const HomeNet& net() {
    static const HomeNet n = HomeNet::parse("172.16.0.0/16");
    return n;
}

} // namespace

TEST_CASE("json alert line maps to a record") {
    std::istringstream in(
        R"({"ts":5.0,"src":"10.0.0.2","sport":4321,"dst":"172.16.0.1","dport":80,"rule_id":"sqli-1","msg":"UNION SELECT"})"
        "\n");
    const auto records = parse_alert_feed(in);
    REQUIRE(records.size() == 1);
    CHECK(records[0].ts == 5.0);
    CHECK(records[0].src == Host{0x0A000002u, 4321});
    CHECK(records[0].dst == Host{0xAC100001u, 80});
    CHECK(records[0].rule_id == "sqli-1");
    CHECK(records[0].message == "UNION SELECT");
    CHECK(!records[0].magnitude);
}

TEST_CASE("json alert with magnitude") {
    std::istringstream in(
        R"({"ts":5.0,"src":"10.0.0.2","sport":4321,"dst":"172.16.0.1","dport":80,"rule_id":"x","msg":"y","magnitude":7.5})"
        "\n");
    const auto records = parse_alert_feed(in);
    REQUIRE(records.size() == 1);
    REQUIRE(records[0].magnitude);
    CHECK(*records[0].magnitude == 7.5);
}

TEST_CASE("out-of-range ports and garbage lines are skipped with a count") {
    std::istringstream in(
        R"({"ts":5.0,"src":"10.0.0.2","sport":70000,"dst":"172.16.0.1","dport":80,"rule_id":"x","msg":"y"})"
        "\n"
        "complete nonsense\n"
        R"({"ts":6.0,"src":"10.0.0.2","sport":1,"dst":"172.16.0.1","dport":80,"rule_id":"x","msg":"y"})"
        "\n");
    std::size_t skipped = 0;
    const auto records = parse_alert_feed(in, &skipped);
    CHECK(records.size() == 1);
    CHECK(skipped == 2);
}

TEST_CASE("fast alert text parses, mixed with json lines") {
    std::istringstream in(
        "01/02-03:04:05.123456 [**] [1:2001:9] SQL injection attempt [**] {TCP} 10.0.0.2:4321 -> 172.16.0.1:80\n"
        R"({"ts":9.0,"src":"10.0.0.3","sport":5555,"dst":"172.16.0.1","dport":80,"rule_id":"z","msg":"w"})"
        "\n");
    const auto records = parse_alert_feed(in);
    REQUIRE(records.size() == 2);
    CHECK(records[0].src == Host{0x0A000002u, 4321});
    CHECK(records[0].dst == Host{0xAC100001u, 80});
    CHECK(records[0].rule_id == "1:2001:9");
    CHECK(records[0].message == "SQL injection attempt");
    // Jan 2nd 03:04:05.123456 anchored at epoch day zero
    const double expected = ((1 * 24.0 + 3) * 60.0 + 4) * 60.0 + 5.123456;
    CHECK(records[0].ts == doctest::Approx(expected).epsilon(1e-12));
    CHECK(!records[0].magnitude);
    CHECK(records[1].src.port == 5555);
}

TEST_CASE("fast alert rejects non-tcp and mangled lines") {
    std::istringstream in(
        "01/02-03:04:05.1 [**] [1] msg [**] {UDP} 10.0.0.2:1 -> 172.16.0.1:2\n"
        "13/40-99:99:99.0 [**] [1] msg [**] {TCP} 10.0.0.2:1 -> 172.16.0.1:2\n"
        "01/02-03:04:05.1 [**] [1] msg {TCP} 10.0.0.2:1 -> 172.16.0.1:2\n");
    std::size_t skipped = 0;
    const auto records = parse_alert_feed(in, &skipped);
    CHECK(records.empty());
    CHECK(skipped == 3);
}

TEST_CASE("to_alarm maps records and skips out-of-scope ones") {
    AlertRecord r;
    r.ts = 5.0;
    r.src = Host{0x0A000002u, 4321};
    r.dst = Host{0xAC100001u, 80};
    const auto a = to_alarm(r, net());
    REQUIRE(a);
    CHECK(a->id == "10.0.0.2:4321>172.16.0.1:80");
    CHECK(a->magnitude == -std::numeric_limits<double>::infinity());
    CHECK(a->attacker == r.src);
    CHECK(a->victim == r.dst);
    CHECK(a->raised_at == 5.0);
    CHECK(a->counter == 1);
    CHECK(!a->processed);
    CHECK(!a->true_incident);

    r.magnitude = 7.5;
    CHECK(to_alarm(r, net())->magnitude == 7.5);

    AlertRecord outbound = r;
    outbound.dst = Host{0x0A000009u, 80}; // destination outside the home net
    CHECK(!to_alarm(outbound, net()));

    AlertRecord internal = r;
    internal.src = Host{0xAC100005u, 4321}; // source inside the home net
    CHECK(!to_alarm(internal, net()));
}

TEST_CASE("to_alarm output always satisfies the alarm invariants") {
    DetRng rng(404);
    for (int i = 0; i < 500; ++i) {
        AlertRecord r;
        r.ts = rng.unit() * 100;
        r.src = Host{static_cast<Ipv4>(rng.next()), static_cast<std::uint16_t>(rng.below(65536))};
        r.dst = Host{static_cast<Ipv4>(rng.next()), static_cast<std::uint16_t>(rng.below(65536))};
        if (rng.below(2)) r.magnitude = rng.unit() * 10;
        const auto a = to_alarm(r, net());
        if (!a) continue;
        CHECK(net().contains(a->victim.address));
        CHECK(!net().contains(a->attacker.address));
        CHECK(a->counter >= 1);
    }
}

TEST_CASE("parse then alarm-convert preserves feed order") {
    std::ostringstream feed;
    std::vector<std::string> expected_ids;
    for (int i = 0; i < 20; ++i) {
        AlertRecord r;
        r.ts = static_cast<double>(i);
        r.src = Host{0x0A000002u, static_cast<std::uint16_t>(1000 + i)};
        r.dst = Host{0xAC100001u, 80};
        feed << alert_to_jsonl(r) << '\n';
        expected_ids.push_back(mint_alarm_id(r));
    }
    std::istringstream in(feed.str());
    const auto records = parse_alert_feed(in);
    REQUIRE(records.size() == 20);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].ts == static_cast<double>(i));
        CHECK(to_alarm(records[i], net())->id == expected_ids[i]);
    }
}

TEST_CASE("alert writer round-trips through the parser") {
    AlertRecord r;
    r.ts = 12.25;
    r.src = Host{0x0A000002u, 4321};
    r.dst = Host{0xAC100001u, 80};
    r.rule_id = "stub-1";
    r.message = "pattern match: \"quoted\"";
    r.magnitude = 3.5;
    std::istringstream in(alert_to_jsonl(r) + "\n");
    const auto records = parse_alert_feed(in);
    REQUIRE(records.size() == 1);
    CHECK(records[0].ts == r.ts);
    CHECK(records[0].src == r.src);
    CHECK(records[0].dst == r.dst);
    CHECK(records[0].rule_id == r.rule_id);
    CHECK(records[0].message == r.message);
    CHECK(records[0].magnitude == r.magnitude);
}

#ifndef ALERTSIFT_TRAFFIC_HPP
#define ALERTSIFT_TRAFFIC_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace alertsift {

// IPv4 address in host byte order.
using Ipv4 = std::uint32_t;

std::optional<Ipv4> parse_ipv4(std::string_view text);
std::string format_ipv4(Ipv4 address);

struct Host {
    Ipv4 address = 0;
    std::uint16_t port = 0;

    auto operator<=>(const Host&) const = default;
};

// "a.b.c.d:port"
std::string format_host(const Host& h);
std::optional<Host> parse_host(std::string_view text);

struct Cidr {
    Ipv4 base = 0;
    int length = 0; // 0..32

    bool contains(Ipv4 address) const {
        const Ipv4 mask = length == 0 ? 0 : ~Ipv4{0} << (32 - length);
        return (address & mask) == (base & mask);
    }
};

std::optional<Cidr> parse_cidr(std::string_view text);
std::string format_cidr(const Cidr& c);

// The protected address space. Alarms have the attacker outside and the
// victim inside it.
class HomeNet {
public:
    explicit HomeNet(std::vector<Cidr> prefixes);

    // comma-separated CIDR list, e.g. "172.16.0.0/16,192.168.0.0/24"
    static HomeNet parse(std::string_view csv);

    bool contains(Ipv4 address) const;
    const std::vector<Cidr>& prefixes() const { return prefixes_; }

private:
    std::vector<Cidr> prefixes_;
};

inline bool in_homenet(Ipv4 address, const HomeNet& net) { return net.contains(address); }

inline constexpr std::size_t kMaxPayload = 65535;

// One captured TCP segment. Immutable value once built.
struct Packet {
    Host source;
    Host destination;
    double timestamp = 0.0;
    std::vector<std::uint8_t> payload;

    bool operator==(const Packet&) const = default;
};

enum class Direction { Inbound, Outbound, Internal, External };

const char* to_string(Direction d);
Direction direction(const Packet& p, const HomeNet& net);

// Canonical connection orientation: server is the HomeNet-side endpoint,
// falling back to source-initiates when the packet does not cross the border.
struct FlowKey {
    Host client;
    Host server;

    auto operator<=>(const FlowKey&) const = default;

    FlowKey reverse() const { return FlowKey{server, client}; }

    static FlowKey of(const Packet& p, const HomeNet& net);
};

} // namespace alertsift

#endif

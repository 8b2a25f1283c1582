#include "alertsift/traffic.hpp"

#include <charconv>
#include <stdexcept>

namespace alertsift {

namespace {

bool parse_u32(std::string_view text, std::uint32_t& out, std::uint32_t max) {
    if (text.empty() || text.size() > 10) return false;
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size()) return false;
    if (v > max) return false;
    out = v;
    return true;
}

} // namespace

std::optional<Ipv4> parse_ipv4(std::string_view text) {
    Ipv4 value = 0;
    std::size_t start = 0;
    for (int octet = 0; octet < 4; ++octet) {
        const std::size_t dot = octet < 3 ? text.find('.', start) : text.size();
        if (dot == std::string_view::npos) return std::nullopt;
        std::uint32_t part = 0;
        if (!parse_u32(text.substr(start, dot - start), part, 255)) return std::nullopt;
        value = (value << 8) | part;
        start = dot + 1;
    }
    return value;
}

std::string format_ipv4(Ipv4 address) {
    std::string out;
    out.reserve(15);
    for (int shift = 24; shift >= 0; shift -= 8) {
        out += std::to_string((address >> shift) & 0xff);
        if (shift) out += '.';
    }
    return out;
}

std::string format_host(const Host& h) {
    return format_ipv4(h.address) + ':' + std::to_string(h.port);
}

std::optional<Host> parse_host(std::string_view text) {
    const std::size_t colon = text.rfind(':');
    if (colon == std::string_view::npos) return std::nullopt;
    const auto addr = parse_ipv4(text.substr(0, colon));
    if (!addr) return std::nullopt;
    std::uint32_t port = 0;
    if (!parse_u32(text.substr(colon + 1), port, 65535)) return std::nullopt;
    return Host{*addr, static_cast<std::uint16_t>(port)};
}

std::optional<Cidr> parse_cidr(std::string_view text) {
    const std::size_t slash = text.find('/');
    std::string_view addr_part = slash == std::string_view::npos ? text : text.substr(0, slash);
    const auto addr = parse_ipv4(addr_part);
    if (!addr) return std::nullopt;
    std::uint32_t length = 32;
    if (slash != std::string_view::npos && !parse_u32(text.substr(slash + 1), length, 32))
        return std::nullopt;
    return Cidr{*addr, static_cast<int>(length)};
}

std::string format_cidr(const Cidr& c) {
    return format_ipv4(c.base) + '/' + std::to_string(c.length);
}

HomeNet::HomeNet(std::vector<Cidr> prefixes) : prefixes_(std::move(prefixes)) {
    if (prefixes_.empty())
        throw std::invalid_argument("HomeNet requires at least one prefix");
    for (const Cidr& c : prefixes_)
        if (c.length < 0 || c.length > 32)
            throw std::invalid_argument("HomeNet prefix length out of range");
}

HomeNet HomeNet::parse(std::string_view csv) {
    std::vector<Cidr> prefixes;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string_view::npos) comma = csv.size();
        const std::string_view item = csv.substr(start, comma - start);
        if (!item.empty()) {
            const auto cidr = parse_cidr(item);
            if (!cidr)
                throw std::invalid_argument("bad CIDR prefix: '" + std::string(item) + "'");
            prefixes.push_back(*cidr);
        }
        start = comma + 1;
    }
    return HomeNet(std::move(prefixes));
}

bool HomeNet::contains(Ipv4 address) const {
    for (const Cidr& c : prefixes_)
        if (c.contains(address)) return true;
    return false;
}

const char* to_string(Direction d) {
    switch (d) {
    case Direction::Inbound: return "Inbound";
    case Direction::Outbound: return "Outbound";
    case Direction::Internal: return "Internal";
    case Direction::External: return "External";
    }
    return "?";
}

Direction direction(const Packet& p, const HomeNet& net) {
    const bool src_in = net.contains(p.source.address);
    const bool dst_in = net.contains(p.destination.address);
    if (src_in && dst_in) return Direction::Internal;
    if (src_in) return Direction::Outbound;
    if (dst_in) return Direction::Inbound;
    return Direction::External;
}

FlowKey FlowKey::of(const Packet& p, const HomeNet& net) {
    switch (direction(p, net)) {
    case Direction::Inbound: return FlowKey{p.source, p.destination};
    case Direction::Outbound: return FlowKey{p.destination, p.source};
    default: return FlowKey{p.source, p.destination};
    }
}

} // namespace alertsift

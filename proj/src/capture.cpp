#include "alertsift/capture.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "alertsift/numfmt.hpp"

namespace alertsift {

namespace {

constexpr std::uint32_t kMagicUsec = 0xa1b2c3d4;
constexpr std::uint32_t kMagicUsecSwapped = 0xd4c3b2a1;
constexpr std::uint32_t kMagicNsec = 0xa1b23c4d;
constexpr std::uint32_t kMagicNsecSwapped = 0x4d3cb2a1;

constexpr std::uint32_t kLinkEthernet = 1;
constexpr std::uint32_t kLinkRawIp = 101;

std::uint32_t swap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xff00) | ((v << 8) & 0xff0000) | (v << 24);
}

std::uint16_t load_be16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

const char hex_digits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::string hex_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out += hex_digits[b >> 4];
        out += hex_digits[b & 0xf];
    }
    return out;
}

bool hex_decode(std::string_view hex, std::vector<std::uint8_t>& out) {
    if (hex.size() % 2 != 0) return false;
    out.clear();
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_value(hex[i]);
        const int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) return false;
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return true;
}

struct CaptureReader::Impl {
    std::istream& in;
    std::string name;
    enum class Mode { Pcap, JsonLines } mode = Mode::JsonLines;

    // pcap state
    bool swapped = false;
    double tick = 1e-6;
    std::uint32_t linktype = kLinkEthernet;
    std::size_t offset = 0; // bytes consumed, for error messages

    explicit Impl(std::istream& s, std::string n) : in(s), name(std::move(n)) {}

    std::uint32_t read32() {
        std::uint8_t b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        offset += 4;
        std::uint32_t v;
        std::memcpy(&v, b, 4);
        return swapped ? swap32(v) : v;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError(name + ": " + what + " at byte offset " + std::to_string(offset));
    }

    void open() {
        // Peek the first four bytes to tell pcap from JSON-lines.
        std::uint8_t head[4];
        in.read(reinterpret_cast<char*>(head), 4);
        const std::streamsize got = in.gcount();
        if (got == 0) {
            mode = Mode::JsonLines; // empty stream: empty packet sequence
            return;
        }
        if (got == 4) {
            std::uint32_t magic;
            std::memcpy(&magic, head, 4);
            if (magic == kMagicUsec || magic == kMagicNsec ||
                magic == kMagicUsecSwapped || magic == kMagicNsecSwapped) {
                mode = Mode::Pcap;
                swapped = (magic == kMagicUsecSwapped || magic == kMagicNsecSwapped);
                tick = (magic == kMagicNsec || magic == kMagicNsecSwapped) ? 1e-9 : 1e-6;
                offset = 4;
                read_pcap_header();
                return;
            }
        }
        if (head[0] == '{' || head[0] == '\n' || head[0] == '\r' ||
            head[0] == ' ' || head[0] == '\t') {
            in.clear();
            in.seekg(0);
            mode = Mode::JsonLines;
            return;
        }
        throw FormatError(name + ": unknown capture magic at byte offset 0");
    }

    void read_pcap_header() {
        // version(2x16), thiszone(32), sigfigs(32), snaplen(32), linktype(32)
        std::uint8_t rest[20];
        in.read(reinterpret_cast<char*>(rest), 20);
        if (in.gcount() != 20) fail("truncated pcap file header");
        offset += 20;
        std::uint32_t link;
        std::memcpy(&link, rest + 16, 4);
        if (swapped) link = swap32(link);
        if (link != kLinkEthernet && link != kLinkRawIp)
            throw FormatError(name + ": unsupported pcap link type " + std::to_string(link));
        linktype = link;
    }

    // Extracts the TCP segment from one captured frame. Returns false for
    // anything that is not usable TCP; *malformed distinguishes broken
    // records from clean non-TCP ones.
    bool decode_frame(const std::vector<std::uint8_t>& frame, double ts, Packet& out,
                      bool* malformed) {
        *malformed = false;
        std::size_t ip_off = 0;
        if (linktype == kLinkEthernet) {
            if (frame.size() < 14) {
                *malformed = true;
                return false;
            }
            if (load_be16(frame.data() + 12) != 0x0800) return false; // not IPv4
            ip_off = 14;
        }
        if (frame.size() < ip_off + 20) {
            *malformed = true;
            return false;
        }
        const std::uint8_t* ip = frame.data() + ip_off;
        if ((ip[0] >> 4) != 4) {
            if (linktype == kLinkRawIp) return false; // IPv6 etc.
            *malformed = true;
            return false;
        }
        const std::size_t ihl = static_cast<std::size_t>(ip[0] & 0xf) * 4;
        if (ihl < 20 || frame.size() < ip_off + ihl) {
            *malformed = true;
            return false;
        }
        const std::size_t total_len = load_be16(ip + 2);
        if (total_len < ihl || frame.size() < ip_off + total_len) {
            *malformed = true;
            return false;
        }
        if (ip[9] != 6) return false;             // not TCP
        if ((load_be16(ip + 6) & 0x1fff) != 0) return false; // non-first fragment
        const std::uint8_t* tcp = ip + ihl;
        const std::size_t tcp_avail = total_len - ihl;
        if (tcp_avail < 20) {
            *malformed = true;
            return false;
        }
        const std::size_t data_off = static_cast<std::size_t>(tcp[12] >> 4) * 4;
        if (data_off < 20 || data_off > tcp_avail) {
            *malformed = true;
            return false;
        }
        std::uint32_t src, dst;
        std::memcpy(&src, ip + 12, 4);
        std::memcpy(&dst, ip + 16, 4);
        out.source = Host{swap32(src), load_be16(tcp)}; // wire is big-endian
        out.destination = Host{swap32(dst), load_be16(tcp + 2)};
        out.timestamp = ts;
        out.payload.assign(tcp + data_off, tcp + tcp_avail);
        return true;
    }

    // next pcap record; false at EOF, throws on structural damage
    bool next_pcap(Packet& out, std::size_t& skipped) {
        for (;;) {
            std::uint8_t rec[16];
            in.read(reinterpret_cast<char*>(rec), 16);
            const std::streamsize got = in.gcount();
            if (got == 0) return false;
            if (got != 16) {
                ++skipped; // trailing partial record header
                return false;
            }
            std::uint32_t ts_sec, ts_frac, incl_len;
            std::memcpy(&ts_sec, rec, 4);
            std::memcpy(&ts_frac, rec + 4, 4);
            std::memcpy(&incl_len, rec + 8, 4);
            if (swapped) {
                ts_sec = swap32(ts_sec);
                ts_frac = swap32(ts_frac);
                incl_len = swap32(incl_len);
            }
            offset += 16;
            if (incl_len > (1u << 26)) fail("implausible pcap record length");
            std::vector<std::uint8_t> frame(incl_len);
            in.read(reinterpret_cast<char*>(frame.data()), incl_len);
            if (in.gcount() != static_cast<std::streamsize>(incl_len)) {
                ++skipped; // truncated final record
                return false;
            }
            offset += incl_len;
            const double ts = static_cast<double>(ts_sec) + static_cast<double>(ts_frac) * tick;
            bool malformed = false;
            if (decode_frame(frame, ts, out, &malformed)) return true;
            if (malformed) ++skipped;
        }
    }

    bool next_jsonl(Packet& out, std::size_t& skipped) {
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            bool blank = true;
            for (char c : line)
                if (c != ' ' && c != '\t') { blank = false; break; }
            if (blank) continue;
            if (parse_line(line, out)) return true;
            ++skipped;
        }
        return false;
    }

    static bool parse_line(const std::string& line, Packet& out) {
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
        if (!j.contains("payload_hex") || !j["payload_hex"].is_string()) return false;
        std::vector<std::uint8_t> payload;
        if (!hex_decode(j["payload_hex"].get<std::string>(), payload)) return false;
        if (payload.size() > kMaxPayload) return false;
        out.source = Host{*src, static_cast<std::uint16_t>(sport)};
        out.destination = Host{*dst, static_cast<std::uint16_t>(dport)};
        out.timestamp = ts;
        out.payload = std::move(payload);
        return true;
    }
};

CaptureReader::CaptureReader(std::istream& in, std::string name)
    : impl_(std::make_unique<Impl>(in, std::move(name))) {
    impl_->open();
}

CaptureReader::~CaptureReader() = default;

bool CaptureReader::next(Packet& out) {
    if (impl_->mode == Impl::Mode::Pcap) return impl_->next_pcap(out, skipped_);
    return impl_->next_jsonl(out, skipped_);
}

std::vector<Packet> parse_capture(std::istream& in, std::string name, std::size_t* skipped) {
    CaptureReader reader(in, std::move(name));
    std::vector<Packet> packets;
    Packet p;
    while (reader.next(p)) packets.push_back(std::move(p));
    if (skipped) *skipped = reader.skipped();
    return packets;
}

std::vector<Packet> parse_capture_file(const std::string& path, std::size_t* skipped) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    return parse_capture(in, path, skipped);
}

std::string packet_to_jsonl(const Packet& p) {
    std::string out = "{\"ts\":";
    out += format_double(p.timestamp);
    out += ",\"src\":\"";
    out += format_ipv4(p.source.address);
    out += "\",\"sport\":";
    out += std::to_string(p.source.port);
    out += ",\"dst\":\"";
    out += format_ipv4(p.destination.address);
    out += "\",\"dport\":";
    out += std::to_string(p.destination.port);
    out += ",\"payload_hex\":\"";
    out += hex_encode(p.payload);
    out += "\"}";
    return out;
}

void write_packets_jsonl(std::ostream& out, std::span<const Packet> packets) {
    for (const Packet& p : packets) out << packet_to_jsonl(p) << '\n';
}

} // namespace alertsift

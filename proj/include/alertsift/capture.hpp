#ifndef ALERTSIFT_CAPTURE_HPP
#define ALERTSIFT_CAPTURE_HPP

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "alertsift/traffic.hpp"

namespace alertsift {

// Fatal capture/model/feed format problem: unknown magic, truncated header,
// unsupported link type. Message carries the byte offset where known.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sequential reader over a capture stream. Detects classic pcap (either byte
// order, microsecond or nanosecond resolution, Ethernet or raw-IP link) by
// magic, and falls back to JSON-lines when the stream starts with '{' or is
// empty. One reader per stream; not shared.
class CaptureReader {
public:
    CaptureReader(std::istream& in, std::string name = "<stream>");
    ~CaptureReader();

    CaptureReader(const CaptureReader&) = delete;
    CaptureReader& operator=(const CaptureReader&) = delete;

    // Next TCP packet; false at end of stream. Non-TCP records are skipped
    // silently, malformed records are skipped and counted.
    bool next(Packet& out);

    std::size_t skipped() const { return skipped_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t skipped_ = 0;
};

std::vector<Packet> parse_capture(std::istream& in, std::string name = "<stream>",
                                  std::size_t* skipped = nullptr);
std::vector<Packet> parse_capture_file(const std::string& path, std::size_t* skipped = nullptr);

// Canonical JSON-lines form; parse -> write is byte-stable.
std::string packet_to_jsonl(const Packet& p);
void write_packets_jsonl(std::ostream& out, std::span<const Packet> packets);

std::string hex_encode(std::span<const std::uint8_t> bytes);
bool hex_decode(std::string_view hex, std::vector<std::uint8_t>& out);

} // namespace alertsift

#endif

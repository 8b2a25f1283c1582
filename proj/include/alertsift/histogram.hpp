#ifndef ALERTSIFT_HISTOGRAM_HPP
#define ALERTSIFT_HISTOGRAM_HPP

#include <array>
#include <cstdint>
#include <span>

namespace alertsift {

// Relative frequency of each byte value in a payload; all-zero for an empty
// payload.
using ByteHistogram = std::array<double, 256>;

inline ByteHistogram histogram(std::span<const std::uint8_t> payload) {
    ByteHistogram h{};
    if (payload.empty()) return h;
    std::array<std::uint32_t, 256> counts{};
    for (std::uint8_t b : payload) ++counts[b];
    const double n = static_cast<double>(payload.size());
    for (int i = 0; i < 256; ++i) h[i] = static_cast<double>(counts[i]) / n;
    return h;
}

} // namespace alertsift

#endif

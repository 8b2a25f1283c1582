#ifndef ALERTSIFT_DETRNG_HPP
#define ALERTSIFT_DETRNG_HPP

#include <cstdint>
#include <random>

namespace alertsift {

// Deterministic random source. mt19937_64 has a standard-mandated sequence,
// and all derived draws below avoid std::*_distribution (whose output is
// implementation-defined), so the same seed gives the same stream everywhere.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0, 1)
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [0, n), n >= 1; rejection sampling keeps it unbiased
    std::uint64_t below(std::uint64_t n) {
        if (n < 2) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    // uniform in [lo, hi] inclusive
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        return lo + below(hi - lo + 1);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace alertsift

#endif

#ifndef ALERTSIFT_BYTESTATS_HPP
#define ALERTSIFT_BYTESTATS_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "alertsift/histogram.hpp"

namespace alertsift {

// Per-(server port, SOM class) byte statistics, maintained incrementally
// (Welford). stddev uses the population form sqrt(m2/n).
struct ClassModel {
    std::uint64_t n = 0;
    std::array<double, 256> mean{};
    std::array<double, 256> m2{};
    double alpha = 0.001;
};

inline void stats_update(ClassModel& m, const ByteHistogram& h) {
    m.n += 1;
    const double n = static_cast<double>(m.n);
    for (int i = 0; i < 256; ++i) {
        const double delta = h[i] - m.mean[i];
        m.mean[i] += delta / n;
        m.m2[i] += delta * (h[i] - m.mean[i]);
    }
}

inline double stats_stddev(const ClassModel& m, int i) {
    if (m.n == 0) return 0.0;
    return std::sqrt(m.m2[i] / static_cast<double>(m.n));
}

// Simplified Mahalanobis distance between a histogram and the class profile.
inline double stats_score(const ClassModel& m, const ByteHistogram& h) {
    double score = 0.0;
    for (int i = 0; i < 256; ++i)
        score += std::abs(h[i] - m.mean[i]) / (stats_stddev(m, i) + m.alpha);
    return score;
}

} // namespace alertsift

#endif

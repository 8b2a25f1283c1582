#include "alertsift/som.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "alertsift/detrng.hpp"

namespace alertsift {

SomGrid som_init(int width, int height, std::uint64_t seed) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("SOM dimensions must be positive");
    SomGrid grid;
    grid.width = width;
    grid.height = height;
    grid.r0 = std::max(width, height) / 2.0;
    grid.seed = seed;
    grid.weights.resize(static_cast<std::size_t>(width) * height);
    DetRng rng(seed);
    for (ByteHistogram& w : grid.weights)
        for (double& v : w) v = rng.unit();
    return grid;
}

namespace {

double sq_distance(const ByteHistogram& a, const ByteHistogram& b) {
    double acc = 0.0;
    for (int i = 0; i < 256; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

} // namespace

int som_classify(const SomGrid& grid, const ByteHistogram& h) {
    int best = 0;
    double best_d = sq_distance(grid.weights[0], h);
    const int n = grid.node_count();
    for (int j = 1; j < n; ++j) {
        const double d = sq_distance(grid.weights[j], h);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

SomGrid som_train(SomGrid grid, std::span<const ByteHistogram> samples) {
    if (samples.empty())
        throw std::invalid_argument("SOM training requires at least one sample");
    const int n = grid.node_count();
    const double total_steps = static_cast<double>(grid.epochs) * static_cast<double>(samples.size());
    std::uint64_t step = 0;
    for (int epoch = 0; epoch < grid.epochs; ++epoch) {
        for (const ByteHistogram& x : samples) {
            const double progress = static_cast<double>(step) / total_steps;
            const double eta = grid.eta0 * (1.0 - progress);
            const double radius = std::max(grid.r0 * (1.0 - progress), 0.5);
            const int bmu = som_classify(grid, x);
            const int bmu_row = bmu / grid.width;
            const int bmu_col = bmu % grid.width;
            const double denom = 2.0 * radius * radius;
            for (int j = 0; j < n; ++j) {
                const double dr = static_cast<double>(j / grid.width - bmu_row);
                const double dc = static_cast<double>(j % grid.width - bmu_col);
                const double pull = eta * std::exp(-(dr * dr + dc * dc) / denom);
                if (pull == 0.0) continue;
                ByteHistogram& w = grid.weights[j];
                for (int i = 0; i < 256; ++i) w[i] += pull * (x[i] - w[i]);
            }
            ++step;
        }
    }
    return grid;
}

} // namespace alertsift

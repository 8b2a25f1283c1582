#ifndef ALERTSIFT_SOM_HPP
#define ALERTSIFT_SOM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "alertsift/histogram.hpp"

namespace alertsift {

// Kohonen self-organizing map over byte histograms. Nodes are stored
// row-major; classification returns a node index.
struct SomGrid {
    int width = 0;
    int height = 0;
    int epochs = 3;
    double eta0 = 0.5;
    double r0 = 0.0;
    std::uint64_t seed = 0;
    std::vector<ByteHistogram> weights;

    int node_count() const { return width * height; }
};

// Fresh grid with weights drawn uniformly from [0,1); same (width, height,
// seed) gives a bit-identical grid. epochs/eta0/r0 are left at the schedule
// defaults (r0 = max(width, height) / 2).
SomGrid som_init(int width, int height, std::uint64_t seed);

// Index of the node nearest to h (Euclidean); ties go to the lowest index.
int som_classify(const SomGrid& grid, const ByteHistogram& h);

// One pass of epochs * |samples| steps with linearly decaying learning rate
// and Gaussian neighborhood (radius floored at 0.5). Order-dependent and
// deterministic.
SomGrid som_train(SomGrid grid, std::span<const ByteHistogram> samples);

} // namespace alertsift

#endif

#pragma once

#include <vector>

namespace mfbsde {

// Uniform partition 0 = t_0 < ... < t_N = T. dt is computed once and every
// consumer works with (node index, dt); nodes are kept for reporting.
struct TimeGrid {
    double horizon = 0.0;
    int steps = 0;
    double dt = 0.0;
    std::vector<double> nodes;
};

TimeGrid build_grid(double horizon, int steps);

}  // namespace mfbsde

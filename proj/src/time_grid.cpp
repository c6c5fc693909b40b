#include "mfbsde/time_grid.hpp"

#include <cmath>

#include "mfbsde/errors.hpp"

namespace mfbsde {

TimeGrid build_grid(double horizon, int steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw InvalidArgument("grid horizon must be finite and positive");
    }
    if (steps < 1) throw InvalidArgument("grid needs at least one step");

    TimeGrid grid;
    grid.horizon = horizon;
    grid.steps = steps;
    grid.dt = horizon / steps;
    grid.nodes.resize(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k < steps; ++k) grid.nodes[k] = k * grid.dt;
    grid.nodes[steps] = horizon;
    return grid;
}

}  // namespace mfbsde

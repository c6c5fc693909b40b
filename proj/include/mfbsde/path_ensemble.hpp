#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mfbsde/time_grid.hpp"
#include "mfbsde/types.hpp"

namespace mfbsde {

// Monte Carlo Brownian ensemble on a time grid. increments[k] holds dW over
// [t_k, t_{k+1}) and cumulative[k] holds W_{t_k}, both paths x dim. Cumulative
// values satisfy W[k+1] = W[k] + dW[k] exactly, by construction.
struct PathEnsemble {
    TimeGrid grid;
    int paths = 0;
    int dim = 0;
    std::uint64_t seed = 0;
    std::vector<RowMat> increments;
    std::vector<RowMat> cumulative;

    const RowMat& terminal() const { return cumulative.back(); }
};

// Draws the ensemble with per-(path, step, coordinate) counter-based normals:
// path p is bit-identical whether generated serially or by any worker count.
// `stream` separates independent copies sharing one seed (particle systems).
PathEnsemble simulate_paths(const TimeGrid& grid, int paths, int dim, std::uint64_t seed,
                            std::uint32_t stream = 0);

// Debug dumps in path-major order; layouts documented in docs/formats.md.
void write_csv(const PathEnsemble& ensemble, std::ostream& out);
void write_binary(const PathEnsemble& ensemble, std::ostream& out);

}  // namespace mfbsde

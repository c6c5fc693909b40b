#pragma once

#include <vector>

#include "mfbsde/condexp.hpp"
#include "mfbsde/time_grid.hpp"
#include "mfbsde/types.hpp"

namespace mfbsde {

struct SolutionNorms {
    double sup_y = 0.0;
    double z2 = 0.0;
};

// Discrete (Y, Z) pair on a backend's state sets: y[k] is S_k x m for
// k = 0..N, z[k] is S_k x (m*d) for k = 0..N-1 (same row-major component
// layout as generator arguments). mean_y / mean_z cache the backend means of
// each slice; norms cache the sampled sup norm of Y and the Z^2 estimate.
struct DiscreteSolution {
    TimeGrid grid;
    int m = 0;
    int d = 0;
    std::vector<RowMat> y;
    std::vector<RowMat> z;
    std::vector<Eigen::VectorXd> mean_y;
    std::vector<Eigen::VectorXd> mean_z;
    SolutionNorms norms;

    static DiscreteSolution zero(const CondExpBackend& backend, int m);

    void refresh_means(const CondExpBackend& backend);
    void refresh_norms(const CondExpBackend& backend);
};

}  // namespace mfbsde

#include "mfbsde/solution.hpp"

#include "mfbsde/errors.hpp"
#include "mfbsde/norms.hpp"

namespace mfbsde {

DiscreteSolution DiscreteSolution::zero(const CondExpBackend& backend, int m) {
    if (m < 1) throw InvalidArgument("solution dimension m must be >= 1");
    const TimeGrid& grid = backend.grid();
    const int d = backend.noise_dim();

    DiscreteSolution sol;
    sol.grid = grid;
    sol.m = m;
    sol.d = d;
    sol.y.resize(static_cast<std::size_t>(grid.steps) + 1);
    sol.z.resize(static_cast<std::size_t>(grid.steps));
    sol.mean_y.assign(static_cast<std::size_t>(grid.steps) + 1, Eigen::VectorXd::Zero(m));
    sol.mean_z.assign(static_cast<std::size_t>(grid.steps), Eigen::VectorXd::Zero(m * d));
    for (int k = 0; k <= grid.steps; ++k) {
        sol.y[k] = RowMat::Zero(backend.state_count(k), m);
        if (k < grid.steps) sol.z[k] = RowMat::Zero(backend.state_count(k), m * d);
    }
    return sol;
}

void DiscreteSolution::refresh_means(const CondExpBackend& backend) {
    for (int k = 0; k <= grid.steps; ++k) {
        mean_y[k] = backend.expect(y[k], k);
        if (k < grid.steps) mean_z[k] = backend.expect(z[k], k);
    }
}

void DiscreteSolution::refresh_norms(const CondExpBackend& backend) {
    norms.sup_y = sup_norm(y);
    norms.z2 = estimate_bmo(z, grid, backend).value;
}

}  // namespace mfbsde

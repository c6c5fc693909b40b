#include "mfbsde/norms.hpp"

#include <cmath>

#include "mfbsde/errors.hpp"

namespace mfbsde {

BmoEstimate estimate_bmo(const std::vector<RowMat>& z, const TimeGrid& grid,
                         const CondExpBackend& backend) {
    if (static_cast<int>(z.size()) != grid.steps) {
        throw InvalidArgument("Z^2 estimate: need one Z slice per step");
    }

    for (int k = 0; k < grid.steps; ++k) {
        if (z[k].rows() != backend.state_count(k)) {
            throw InvalidArgument("Z^2 estimate: slice rows do not match the backend states");
        }
    }

    BmoEstimate est;
    est.profile.assign(static_cast<std::size_t>(grid.steps) + 1, 0.0);

    // Backward recursion for V_k = E_k[ sum_{j>=k} |Z_j|^2 dt ]: tower the
    // next slice down one step and add the local quadratic variation.
    RowMat v = RowMat::Zero(backend.state_count(grid.steps), 1);
    for (int k = grid.steps - 1; k >= 0; --k) {
        RowMat local(backend.state_count(k), 1);
        local.col(0) = z[k].rowwise().squaredNorm() * grid.dt;
        v = local + backend.cond_expect(v, k + 1, k);
        est.profile[k] = v.col(0).maxCoeff();
    }

    double worst = 0.0;
    for (double p : est.profile) worst = std::max(worst, p);
    est.value = std::sqrt(std::max(worst, 0.0));
    return est;
}

double sup_norm(const std::vector<RowMat>& values) {
    double worst = 0.0;
    for (const RowMat& slice : values) {
        if (slice.rows() == 0) continue;
        worst = std::max(worst, slice.rowwise().norm().maxCoeff());
    }
    return worst;
}

double iterate_distance(const DiscreteSolution& a, const DiscreteSolution& b,
                        const CondExpBackend& backend) {
    if (a.m != b.m || a.d != b.d || a.grid.steps != b.grid.steps) {
        throw InvalidArgument("iterate distance: solutions live on different spaces");
    }
    double sup = 0.0;
    for (int k = 0; k <= a.grid.steps; ++k) {
        sup = std::max(sup, (a.y[k] - b.y[k]).rowwise().norm().maxCoeff());
    }
    std::vector<RowMat> dz(static_cast<std::size_t>(a.grid.steps));
    for (int k = 0; k < a.grid.steps; ++k) dz[k] = a.z[k] - b.z[k];
    const BmoEstimate zgap = estimate_bmo(dz, a.grid, backend);
    return sup * sup + zgap.value * zgap.value;
}

}  // namespace mfbsde

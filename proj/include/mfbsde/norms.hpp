#pragma once

#include <vector>

#include "mfbsde/condexp.hpp"
#include "mfbsde/solution.hpp"
#include "mfbsde/types.hpp"

namespace mfbsde {

// Sampled estimate of the Z^2[0, T] norm, sup over stopping times of
// || E_tau int_tau^T |Z|^2 ds ||_inf^(1/2), with two deliberate restrictions:
// stopping times range over grid times only and the essential sup is a max
// over the sampled states. Both restrictions can only shrink the value, hence
// lower_estimate. profile[k] holds the sampled sup of the conditional
// remaining quadratic variation E_k int_{t_k}^T |Z|^2 ds.
struct BmoEstimate {
    double value = 0.0;
    std::vector<double> profile;
    bool lower_estimate = true;
};

BmoEstimate estimate_bmo(const std::vector<RowMat>& z, const TimeGrid& grid,
                         const CondExpBackend& backend);

// Max over steps and states of the Euclidean row norm.
double sup_norm(const std::vector<RowMat>& values);

// Squared iterate gap ||Y_a - Y_b||_sup^2 + ||Z_a - Z_b||_{Z^2}^2; the solver
// contraction diagnostics and stopping rule run on this quantity.
double iterate_distance(const DiscreteSolution& a, const DiscreteSolution& b,
                        const CondExpBackend& backend);

}  // namespace mfbsde

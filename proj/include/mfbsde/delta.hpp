#pragma once

#include <string>
#include <vector>

#include "mfbsde/condexp.hpp"
#include "mfbsde/generator.hpp"
#include "mfbsde/solution.hpp"
#include "mfbsde/types.hpp"

namespace mfbsde {

// Difference quotients of one generator along two discrete solutions
// (m = 1 only; the comparison harness also fixes zbar = 0, so it covers
// zbar-independent drivers). With E = E[Y_k], Et = E[Yt_k]:
//   delta_y[k][s]    = (f(t, Y, E, Z) - f(t, Yt, E, Z)) / (Y - Yt)
//   delta_ybar[k][s] = (f(t, Yt, E, Z) - f(t, Yt, Et, Z)) / (E - Et)
//   delta_z[k][s]    = (f(t, Yt, Et, Z) - f(t, Yt, Et, Zt)) (Z-Zt) / |Z-Zt|^2
// so the three terms telescope exactly:
//   f(t,Y,E,Z) - f(t,Yt,Et,Zt) =
//     delta_y (Y-Yt) + delta_ybar (E-Et) + delta_z . (Z-Zt).
// A vanishing denominator flags the entry and zeroes the coefficient, which
// keeps the identity intact because the paired factor vanishes too.
struct DeltaCoefficients {
    std::vector<Eigen::VectorXd> delta_y;
    std::vector<Eigen::VectorXd> delta_ybar;
    std::vector<RowMat> delta_z;
    std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> flagged_y;
    std::vector<bool> flagged_ybar;
    std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> flagged_z;
};

DeltaCoefficients delta_coefficients(const Generator& gen, const DiscreteSolution& first,
                                     const DiscreteSolution& second);

// Sampled verification of the comparison hypotheses:
//   A1: delta_y and delta_ybar quotients stay finite (maxima reported),
//   A2: the delta_z process has a finite sampled Z^2 norm,
//   A3: at least one of the two drivers is nondecreasing in ybar on a
//       sampled box (witness reported when both fail).
// Sampling cannot certify more than the visited points; treat a pass as
// evidence, not proof.
struct ComparisonHypotheses {
    bool a1 = false;
    double max_delta_y = 0.0;
    double max_delta_ybar = 0.0;
    bool a2 = false;
    double delta_z_z2 = 0.0;
    bool a3 = false;
    bool first_monotone = false;
    bool second_monotone = false;
    std::string a3_witness;
};

struct MonotonicityCheckParams {
    double radius = 1.0;
    int samples = 512;
    std::uint64_t seed = 0;
    double t_max = 1.0;
};

ComparisonHypotheses check_A1_A2_A3(const Generator& first_gen, const Generator& second_gen,
                                    const DiscreteSolution& first, const DiscreteSolution& second,
                                    const CondExpBackend& backend,
                                    const MonotonicityCheckParams& params);

}  // namespace mfbsde

#pragma once

#include <vector>

#include "mfbsde/time_grid.hpp"
#include "mfbsde/types.hpp"

namespace mfbsde {

// Recombining lattice for one-dimensional Brownian motion. Binomial mode moves
// by +-sqrt(dt) with probability 1/2 each; trinomial mode moves by
// +-sqrt(3 dt) with probability 1/6 and stays put with probability 2/3, which
// matches the first four Gaussian increment moments.
//
// Level k node j has value state(k, j); its branching-many children at level
// k+1 are nodes j, j+1, ... with shifts kicks[b] and probabilities probs[b].
struct Lattice {
    TimeGrid grid;
    int branching = 0;
    std::vector<double> kicks;
    std::vector<double> probs;
    std::vector<Eigen::VectorXd> level_probs;

    int width(int level) const {
        return branching == 2 ? level + 1 : 2 * level + 1;
    }

    double state(int level, int node) const {
        return branching == 2 ? kicks[0] * (level - 2 * node)
                              : kicks[0] * (level - node);
    }

    // Column vector of node states at a level (the backend's state matrix).
    Eigen::VectorXd states(int level) const;

    // Probability-weighted mean over a level, one value per column of x.
    // Summation pairs node j with its mirror so an antisymmetric profile
    // cancels exactly; the lattice's symmetry survives in floating point.
    Eigen::VectorXd expect_level(const RowMat& x, int level) const;
};

Lattice build_lattice(const TimeGrid& grid, int branching);

}  // namespace mfbsde

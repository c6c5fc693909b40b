#include "mfbsde/lattice.hpp"

#include <cmath>

#include "mfbsde/errors.hpp"

namespace mfbsde {

Lattice build_lattice(const TimeGrid& grid, int branching) {
    if (grid.steps < 1) throw InvalidArgument("lattice requires a built grid");
    if (branching != 2 && branching != 3) {
        throw InvalidArgument("lattice branching must be 2 (binomial) or 3 (trinomial)");
    }

    Lattice lat;
    lat.grid = grid;
    lat.branching = branching;
    if (branching == 2) {
        const double h = std::sqrt(grid.dt);
        lat.kicks = {h, -h};
        lat.probs = {0.5, 0.5};
    } else {
        const double h = std::sqrt(3.0 * grid.dt);
        const double side = 1.0 / 6.0;
        lat.kicks = {h, 0.0, -h};
        lat.probs = {side, 1.0 - 2.0 * side, side};
    }

    lat.level_probs.resize(static_cast<std::size_t>(grid.steps) + 1);
    lat.level_probs[0] = Eigen::VectorXd::Ones(1);
    for (int k = 0; k < grid.steps; ++k) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(lat.width(k + 1));
        for (int j = 0; j < lat.width(k); ++j) {
            for (int b = 0; b < branching; ++b) {
                next[j + b] += lat.probs[b] * lat.level_probs[k][j];
            }
        }
        lat.level_probs[k + 1] = std::move(next);
    }
    return lat;
}

Eigen::VectorXd Lattice::states(int level) const {
    Eigen::VectorXd s(width(level));
    for (int j = 0; j < s.size(); ++j) s[j] = state(level, j);
    return s;
}

Eigen::VectorXd Lattice::expect_level(const RowMat& x, int level) const {
    if (x.rows() != width(level)) {
        throw InvalidArgument("level mean: value count does not match lattice level width");
    }
    const Eigen::VectorXd& p = level_probs[level];
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.cols());
    int lo = 0;
    int hi = static_cast<int>(x.rows()) - 1;
    for (; lo < hi; ++lo, --hi) {
        out += p[lo] * x.row(lo).transpose() + p[hi] * x.row(hi).transpose();
    }
    if (lo == hi) out += p[lo] * x.row(lo).transpose();
    return out;
}

}  // namespace mfbsde

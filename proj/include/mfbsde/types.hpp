#pragma once

#include <Eigen/Dense>

namespace mfbsde {

// Per-step state blocks are row-major (one row per path or lattice node) so a
// row can be handed to generator callbacks as a contiguous vector view.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const Eigen::VectorXd> row_view(const RowMat& m, Eigen::Index r) {
    return Eigen::Map<const Eigen::VectorXd>(m.data() + r * m.cols(), m.cols());
}

inline Eigen::Map<Eigen::VectorXd> row_view(RowMat& m, Eigen::Index r) {
    return Eigen::Map<Eigen::VectorXd>(m.data() + r * m.cols(), m.cols());
}

}  // namespace mfbsde

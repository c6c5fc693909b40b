#include "mfbsde/condexp.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "mfbsde/errors.hpp"

namespace mfbsde {

namespace {

constexpr double kMaxCondition = 1e12;

void check_rows(const RowMat& x, int expected, const char* where) {
    if (x.rows() != expected) {
        throw InvalidArgument(std::string(where) + ": value rows do not match the state count");
    }
}

void enumerate_monomials(int dim, int degree, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == dim) {
        out.push_back(current);
        return;
    }
    for (int e = 0; e <= degree; ++e) {
        current.push_back(e);
        enumerate_monomials(dim, degree - e, current, out);
        current.pop_back();
    }
}

}  // namespace

std::pair<RowMat, RowMat> CondExpBackend::cond_expect_with_dw(const RowMat& x, int step) const {
    return {cond_expect(x, step + 1, step), cond_expect_dw(x, step)};
}

LatticeBackend::LatticeBackend(Lattice lattice) : lattice_(std::move(lattice)) {}

RowMat LatticeBackend::states(int step) const {
    return lattice_.states(step);
}

RowMat LatticeBackend::one_step(const RowMat& x, int level) const {
    RowMat out = RowMat::Zero(lattice_.width(level), x.cols());
    for (int j = 0; j < out.rows(); ++j) {
        for (int b = 0; b < lattice_.branching; ++b) {
            out.row(j) += lattice_.probs[b] * x.row(j + b);
        }
    }
    return out;
}

RowMat LatticeBackend::cond_expect(const RowMat& x, int from, int at) const {
    if (at < 0 || from > lattice_.grid.steps || at > from) {
        throw InvalidArgument("cond_expect: need 0 <= at <= from <= steps");
    }
    check_rows(x, lattice_.width(from), "cond_expect");
    RowMat cur = x;
    for (int level = from; level > at; --level) cur = one_step(cur, level - 1);
    return cur;
}

Eigen::VectorXd LatticeBackend::expect(const RowMat& x, int step) const {
    check_rows(x, lattice_.width(step), "expect");
    return lattice_.expect_level(x, step);
}

RowMat LatticeBackend::cond_expect_dw(const RowMat& x, int step) const {
    if (step < 0 || step >= lattice_.grid.steps) {
        throw InvalidArgument("cond_expect_dw: step outside the grid");
    }
    check_rows(x, lattice_.width(step + 1), "cond_expect_dw");
    RowMat out = RowMat::Zero(lattice_.width(step), x.cols());
    for (int j = 0; j < out.rows(); ++j) {
        for (int b = 0; b < lattice_.branching; ++b) {
            out.row(j) += lattice_.probs[b] * lattice_.kicks[b] * x.row(j + b);
        }
    }
    return out / lattice_.grid.dt;
}

RowMat monomial_design(const RowMat& state, int degree) {
    if (degree < 0) throw InvalidArgument("basis degree must be >= 0");
    const int dim = static_cast<int>(state.cols());
    std::vector<std::vector<int>> exponents;
    std::vector<int> scratch;
    enumerate_monomials(dim, degree, scratch, exponents);

    RowMat design(state.rows(), static_cast<Eigen::Index>(exponents.size()));
    for (std::size_t c = 0; c < exponents.size(); ++c) {
        Eigen::VectorXd col = Eigen::VectorXd::Ones(state.rows());
        for (int j = 0; j < dim; ++j) {
            for (int e = 0; e < exponents[c][j]; ++e) {
                col.array() *= state.col(j).array();
            }
        }
        design.col(static_cast<Eigen::Index>(c)) = col;
    }
    return design;
}

RegressionBackend::RegressionBackend(const PathEnsemble& ensemble, int degree, double ridge)
    : ensemble_(ensemble), degree_(degree), ridge_(ridge) {
    if (degree < 0) throw InvalidArgument("regression degree must be >= 0");
    if (ridge < 0.0) throw InvalidArgument("regression ridge must be >= 0");
    if (ensemble.paths < 2) throw InvalidArgument("regression needs at least two paths");
}

LeastSquaresProjector::LeastSquaresProjector(const RowMat& design, double ridge,
                                             const std::string& where) {
    if (ridge < 0.0) throw InvalidArgument("regression ridge must be >= 0");
    samples_ = static_cast<double>(design.rows());
    if (samples_ < 1.0) throw InvalidArgument("regression needs at least one sample");

    std::vector<Eigen::Index> kept;
    std::vector<double> scale;
    for (Eigen::Index c = 0; c < design.cols(); ++c) {
        const double rms = std::sqrt(design.col(c).squaredNorm() / samples_);
        if (rms == 0.0) continue;
        bool duplicate = false;
        for (Eigen::Index k : kept) {
            if ((design.col(c).array() == design.col(k).array()).all()) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            kept.push_back(c);
            scale.push_back(rms);
        }
    }

    if (kept.empty()) {
        throw InvalidArgument("regression design (" + where + ") has no usable columns");
    }
    design_.resize(design.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
        design_.col(static_cast<Eigen::Index>(c)) = design.col(kept[c]) / scale[c];
    }

    const Eigen::MatrixXd gram = Eigen::MatrixXd(design_.transpose() * design_) / samples_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd evals = eig.eigenvalues().cwiseMax(0.0);
    condition_ = (evals[evals.size() - 1] + ridge) / (evals[0] + ridge);
    if (!(condition_ <= kMaxCondition)) {
        throw IllConditionedRegression(
            "regression design (" + where + ") is ill-conditioned (condition number " +
                std::to_string(condition_) + ")",
            condition_);
    }
    const Eigen::VectorXd inv = (evals.array() + ridge).inverse().matrix();
    solve_ = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

RowMat LeastSquaresProjector::fitted(const RowMat& targets) const {
    if (targets.rows() != design_.rows()) {
        throw InvalidArgument("regression targets do not match the design row count");
    }
    return design_ * (solve_ * (design_.transpose() * targets / samples_));
}

LeastSquaresProjector RegressionBackend::make_projector(int step) const {
    return LeastSquaresProjector(monomial_design(ensemble_.cumulative[step], degree_), ridge_,
                                 "step " + std::to_string(step));
}

RowMat RegressionBackend::cond_expect(const RowMat& x, int from, int at) const {
    if (at < 0 || from > ensemble_.grid.steps || at > from) {
        throw InvalidArgument("cond_expect: need 0 <= at <= from <= steps");
    }
    check_rows(x, ensemble_.paths, "cond_expect");
    if (from == at) return x;
    return make_projector(at).fitted(x);
}

Eigen::VectorXd RegressionBackend::expect(const RowMat& x, int step) const {
    if (step < 0 || step > ensemble_.grid.steps) {
        throw InvalidArgument("expect: step outside the grid");
    }
    check_rows(x, ensemble_.paths, "expect");
    return x.colwise().mean().transpose();
}

RowMat RegressionBackend::cond_expect_dw(const RowMat& x, int step) const {
    return cond_expect_with_dw(x, step).second;
}

std::pair<RowMat, RowMat> RegressionBackend::cond_expect_with_dw(const RowMat& x,
                                                                 int step) const {
    if (step < 0 || step >= ensemble_.grid.steps) {
        throw InvalidArgument("cond_expect_dw: step outside the grid");
    }
    check_rows(x, ensemble_.paths, "cond_expect_dw");
    const int d = ensemble_.dim;
    const RowMat& dw = ensemble_.increments[step];

    RowMat targets(x.rows(), x.cols() * (1 + d));
    targets.leftCols(x.cols()) = x;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (int j = 0; j < d; ++j) {
            targets.col(x.cols() + c * d + j) =
                x.col(c).cwiseProduct(dw.col(j)) / ensemble_.grid.dt;
        }
    }
    const RowMat fitted = make_projector(step).fitted(targets);
    return {fitted.leftCols(x.cols()), fitted.rightCols(x.cols() * d)};
}

std::unique_ptr<CondExpBackend> make_lattice_backend(const TimeGrid& grid, int branching) {
    return std::make_unique<LatticeBackend>(build_lattice(grid, branching));
}

}  // namespace mfbsde

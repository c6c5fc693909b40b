#pragma once

#include <memory>
#include <utility>

#include "mfbsde/lattice.hpp"
#include "mfbsde/path_ensemble.hpp"
#include "mfbsde/types.hpp"

namespace mfbsde {

// Discrete conditional-expectation operator over a fixed stochastic kernel.
// Values live on per-step state sets: lattice nodes (exact mode) or Monte
// Carlo paths (least-squares projection). All methods are const and safe to
// call concurrently.
class CondExpBackend {
  public:
    virtual ~CondExpBackend() = default;

    virtual const TimeGrid& grid() const = 0;
    virtual int state_count(int step) const = 0;
    virtual int noise_dim() const = 0;
    virtual bool exact() const = 0;

    // State matrix at a step: state_count(step) x noise_dim values of W.
    virtual RowMat states(int step) const = 0;

    // E[x | F_{t_at}] for values x given on step `from` states (from >= at).
    virtual RowMat cond_expect(const RowMat& x, int from, int at) const = 0;

    // Unconditional mean of values on step `step` states.
    virtual Eigen::VectorXd expect(const RowMat& x, int step) const = 0;

    // E[x dW_step^T | F_{t_step}] / dt for x on step+1 states. Column layout:
    // input column c spawns output columns c*d .. c*d+d-1 (noise coordinates).
    virtual RowMat cond_expect_dw(const RowMat& x, int step) const = 0;

    // Both projections of the same target; regression mode shares one
    // factorization. Returns {cond_expect(x, step+1, step), cond_expect_dw}.
    virtual std::pair<RowMat, RowMat> cond_expect_with_dw(const RowMat& x, int step) const;
};

class LatticeBackend : public CondExpBackend {
  public:
    explicit LatticeBackend(Lattice lattice);

    const TimeGrid& grid() const override { return lattice_.grid; }
    int state_count(int step) const override { return lattice_.width(step); }
    int noise_dim() const override { return 1; }
    bool exact() const override { return true; }
    RowMat states(int step) const override;
    RowMat cond_expect(const RowMat& x, int from, int at) const override;
    Eigen::VectorXd expect(const RowMat& x, int step) const override;
    RowMat cond_expect_dw(const RowMat& x, int step) const override;

    const Lattice& lattice() const { return lattice_; }

  private:
    RowMat one_step(const RowMat& x, int level) const;

    Lattice lattice_;
};

// Least-squares Monte Carlo projection onto polynomials of W_{t_k} up to a
// total degree. Zero design columns are dropped, kept columns are scaled to
// unit RMS, and a ridge term stabilises the normal equations; condition
// numbers beyond 1e12 raise IllConditionedRegression.
// Ridge least-squares projection onto the columns of a design matrix.
// Exactly-zero and exactly-duplicated columns are dropped, the rest are
// scaled to unit RMS, and the regularized normal equations are solved by a
// symmetric eigendecomposition; condition numbers beyond 1e12 raise
// IllConditionedRegression (tagged with `where`).
class LeastSquaresProjector {
  public:
    LeastSquaresProjector(const RowMat& design, double ridge, const std::string& where);

    // Least-squares fit evaluated at the sample points themselves.
    RowMat fitted(const RowMat& targets) const;

    double condition() const { return condition_; }

  private:
    RowMat design_;
    Eigen::MatrixXd solve_;
    double samples_ = 0.0;
    double condition_ = 1.0;
};

class RegressionBackend : public CondExpBackend {
  public:
    RegressionBackend(const PathEnsemble& ensemble, int degree, double ridge);

    const TimeGrid& grid() const override { return ensemble_.grid; }
    int state_count(int step) const override { return ensemble_.paths; }
    int noise_dim() const override { return ensemble_.dim; }
    bool exact() const override { return false; }
    RowMat states(int step) const override { return ensemble_.cumulative[step]; }
    RowMat cond_expect(const RowMat& x, int from, int at) const override;
    Eigen::VectorXd expect(const RowMat& x, int step) const override;
    RowMat cond_expect_dw(const RowMat& x, int step) const override;
    std::pair<RowMat, RowMat> cond_expect_with_dw(const RowMat& x, int step) const override;

    int degree() const { return degree_; }
    double ridge() const { return ridge_; }
    const PathEnsemble& ensemble() const { return ensemble_; }

  private:
    LeastSquaresProjector make_projector(int step) const;

    const PathEnsemble& ensemble_;
    int degree_;
    double ridge_;
};

// Basis used by RegressionBackend: all monomials in the columns of `state`
// with total degree <= degree, constant first, graded lexicographic order.
RowMat monomial_design(const RowMat& state, int degree);

std::unique_ptr<CondExpBackend> make_lattice_backend(const TimeGrid& grid, int branching);

}  // namespace mfbsde

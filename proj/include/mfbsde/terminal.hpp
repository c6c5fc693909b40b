#pragma once

#include <functional>
#include <map>
#include <string>

#include "mfbsde/types.hpp"

namespace mfbsde {

// Terminal condition xi = g(W_T) with a declared essential-sup bound. The
// declared bound is an input (certification consumes it); evaluate() verifies
// finiteness and callers cross-check the sampled max against the declaration.
class TerminalValue {
  public:
    using Payoff = std::function<void(Eigen::Ref<const Eigen::VectorXd> w_terminal,
                                      Eigen::Ref<Eigen::VectorXd> out)>;

    TerminalValue(std::string name, int m, int d, double sup_bound, Payoff payoff);

    const std::string& name() const { return name_; }
    int m() const { return m_; }
    int d() const { return d_; }
    double sup_bound() const { return sup_bound_; }

    // Evaluates g row-wise on terminal states (S x d) into an S x m block.
    RowMat evaluate(const RowMat& terminal_states) const;

    // Terminal shifted by a constant vector, bound enlarged accordingly.
    TerminalValue shifted_by(const Eigen::VectorXd& offset, double bound_increment) const;

    // Same payoff with a replacement declared bound.
    TerminalValue with_sup_bound(double sup_bound) const;

  private:
    std::string name_;
    int m_;
    int d_;
    double sup_bound_;
    Payoff payoff_;
};

// Catalog: "constant" (value), "digital" (threshold, scale), "tanh"
// (scale, slope). Defaults documented in docs/scenario_schema.md.
TerminalValue make_catalog_terminal(const std::string& name,
                                    const std::map<std::string, double>& params, int noise_dim);

}  // namespace mfbsde

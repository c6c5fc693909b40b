#include "mfbsde/admissibility.hpp"

#include <cmath>
#include <sstream>

#include "mfbsde/errors.hpp"

namespace mfbsde {

AdmissibilityReport compute_constants(double C, double horizon, double xi_bound,
                                      double zero_drift_bound) {
    if (!(C > 0.0) || !std::isfinite(C)) {
        throw InvalidArgument("certification requires a finite C > 0");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw InvalidArgument("certification requires a finite horizon > 0");
    }
    if (!(xi_bound >= 0.0) || !std::isfinite(xi_bound)) {
        throw InvalidArgument("certification requires a finite terminal bound >= 0");
    }
    if (!(zero_drift_bound >= 0.0) || !std::isfinite(zero_drift_bound)) {
        throw InvalidArgument("certification requires a finite zero-drift bound >= 0");
    }

    const double shape = horizon * horizon + 1.0;

    AdmissibilityReport rep;
    rep.C = C;
    rep.horizon = horizon;
    rep.xi_bound = xi_bound;
    rep.zero_drift_bound = zero_drift_bound;
    rep.rho = 1.0 / (C * std::sqrt(4097.0 * shape));
    rep.beta = 16.0 * C * std::sqrt(shape);
    rep.M = 512.0 * C * C * shape;
    rep.R = 2.0 * std::sqrt(2.0) * xi_bound;
    rep.MR2 = 8.0 * rep.M * xi_bound * xi_bound;

    rep.smallness.lhs = xi_bound + zero_drift_bound;
    rep.smallness.rhs = rep.rho;
    rep.smallness.pass = rep.smallness.lhs <= rep.smallness.rhs;

    rep.beta_cap.lhs = xi_bound;
    rep.beta_cap.rhs = 1.0 / (4.0 * rep.beta);
    rep.beta_cap.pass = rep.MR2 <= 1.0;

    rep.contraction_cap.lhs = xi_bound * xi_bound;
    rep.contraction_cap.rhs = 1.0 / (8.0 * rep.M);
    rep.contraction_cap.pass = rep.MR2 < 1.0;

    rep.certified = rep.smallness.pass && rep.beta_cap.pass && rep.contraction_cap.pass;
    return rep;
}

AdmissibilityReport certify_scenario(const Generator& gen, const TerminalValue& xi,
                                     const TimeGrid& grid, const RowMat& terminal_states,
                                     double declared_zero_drift_bound) {
    const RowMat values = xi.evaluate(terminal_states);
    const double sampled_max = values.rowwise().norm().maxCoeff();
    if (sampled_max > xi.sup_bound() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os.precision(17);
        os << "declared terminal bound " << xi.sup_bound()
           << " is below the sampled max |xi| = " << sampled_max;
        throw ConfigurationError(os.str());
    }

    double quadrature = 0.0;
    for (int k = 0; k < grid.steps; ++k) {
        quadrature += gen.zero_drift(grid.nodes[k]).norm() * grid.dt;
    }
    double zero_bound = declared_zero_drift_bound;
    if (zero_bound < 0.0) {
        zero_bound = quadrature;
    } else if (zero_bound < quadrature * (1.0 - 1e-12)) {
        std::ostringstream os;
        os.precision(17);
        os << "declared zero-drift integral bound " << zero_bound
           << " is below the grid quadrature " << quadrature;
        throw ConfigurationError(os.str());
    }

    return compute_constants(gen.quadratic_constant(), grid.horizon, xi.sup_bound(),
                             zero_bound);
}

}  // namespace mfbsde

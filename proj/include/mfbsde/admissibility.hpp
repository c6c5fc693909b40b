#pragma once

#include "mfbsde/generator.hpp"
#include "mfbsde/terminal.hpp"
#include "mfbsde/time_grid.hpp"
#include "mfbsde/types.hpp"

namespace mfbsde {

struct CheckLine {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

// Constants of the well-posedness regime for declared (C, T, ||xi||_inf,
// integral bound on the zero drift):
//   rho^2 = 1 / (4097 C^2 (T^2 + 1))
//   beta  = 16 C sqrt(T^2 + 1)
//   M     = 512 C^2 (T^2 + 1)
//   R     = 2 sqrt(2) ||xi||_inf
// Checks: smallness ||xi|| + drift bound <= rho; beta_cap ||xi|| <= 1/(4 beta);
// contraction_cap ||xi||^2 < 1/(8 M). Since (4 beta)^-2 = (8 M)^-1, both caps
// compare the same quantity MR2 = 8 M ||xi||^2 = M R^2 against 1 (non-strict
// vs strict), which keeps the implication contraction_cap => beta_cap exact
// in floating point.
struct AdmissibilityReport {
    double C = 0.0;
    double horizon = 0.0;
    double xi_bound = 0.0;
    double zero_drift_bound = 0.0;
    double rho = 0.0;
    double beta = 0.0;
    double M = 0.0;
    double R = 0.0;
    double MR2 = 0.0;
    CheckLine smallness;
    CheckLine beta_cap;
    CheckLine contraction_cap;
    bool certified = false;
};

AdmissibilityReport compute_constants(double C, double horizon, double xi_bound,
                                      double zero_drift_bound);

// compute_constants on scenario data, after reconciling declarations with
// samples: the sampled max |xi| over the supplied terminal states must not
// exceed the declared bound, and a declared zero-drift integral bound must
// dominate the grid quadrature of |f(t, 0, ...)|. Violations raise
// ConfigurationError. Pass declared_zero_drift_bound < 0 to use the
// quadrature value itself.
AdmissibilityReport certify_scenario(const Generator& gen, const TerminalValue& xi,
                                     const TimeGrid& grid, const RowMat& terminal_states,
                                     double declared_zero_drift_bound = -1.0);

}  // namespace mfbsde

#pragma once

#include <vector>

#include "mfbsde/condexp.hpp"
#include "mfbsde/generator.hpp"
#include "mfbsde/solution.hpp"
#include "mfbsde/terminal.hpp"
#include "mfbsde/types.hpp"

namespace mfbsde {

struct PicardParams {
    // Tolerance applies to the squared iterate gap from iterate_distance.
    double tol = 1e-8;
    int max_iter = 50;
};

// deltas has one entry per application of the map; `iterations` counts the
// updates needed before the fixed-point gap dropped to tol, so the final
// confirming application is not counted (a constant map reports 1, not 2).
struct PicardReport {
    int iterations = 0;
    bool converged = false;
    double final_residual = 0.0;
    std::vector<double> deltas;
    std::vector<double> ratios;
    // Per iterate: ||Y||_sup^2 + ||Z||_{Z^2}^2 in the shifted frame, the
    // quantity the invariant-ball argument controls.
    std::vector<double> ball_norms;
};

struct PicardOutcome {
    // De-shifted solution of the original equation: y[N] evaluates xi.
    DiscreteSolution solution;
    // Accumulated zero-drift integral psi_k = sum_{j<k} f(t_j, 0,...) dt.
    // The shifted iterate is y[k] + psi[k] row-wise; psi[N] is the terminal
    // offset that shift_terminal applies.
    std::vector<Eigen::VectorXd> shift;
    PicardReport report;
};

// Integral of the zero drift accumulated along the grid (left endpoints).
std::vector<Eigen::VectorXd> zero_drift_profile(const Generator& gen, const TimeGrid& grid);

// xi_tilde = xi + int_0^T f(s, 0, 0, 0, 0) ds with the declared bound grown by
// the offset magnitude. Requires the zero drift to be finite on the grid.
TerminalValue shift_terminal(const TerminalValue& xi, const Generator& gen,
                             const TimeGrid& grid);

// One application of the fixed-point map: backward induction with the
// generator arguments frozen at `input` (values and means), terminal slice
// from `shifted_terminal`, Z extracted from the martingale part. Output means
// are refreshed; norms are left to the caller.
DiscreteSolution gamma_step(const DiscreteSolution& input, const TerminalValue& shifted_terminal,
                            const Generator& gen, const CondExpBackend& backend);

// Picard iteration from the zero solution. Each pass runs gamma_step on the
// shifted equation and feeds the de-shifted iterate back, so the fixed point
// solves the original (unshifted) equation; see zero_drift_profile.
PicardOutcome picard_solve(const TerminalValue& xi, const Generator& gen,
                           const CondExpBackend& backend, const PicardParams& params);

// Max-abs defects of the converged solution in the backward scheme, with the
// generator evaluated at the solution's own values. The original and shifted
// forms differ only by the telescoped shift, so both should sit at the same
// magnitude; both are reported.
struct ResidualReport {
    double original = 0.0;
    double shifted = 0.0;
    double terminal = 0.0;
};

ResidualReport equation_residuals(const PicardOutcome& outcome, const TerminalValue& xi,
                                  const Generator& gen, const CondExpBackend& backend);

}  // namespace mfbsde

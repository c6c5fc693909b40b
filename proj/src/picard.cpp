#include "mfbsde/picard.hpp"

#include <cmath>
#include <string>

#include "mfbsde/errors.hpp"
#include "mfbsde/norms.hpp"
#include "mfbsde/parallel.hpp"

namespace mfbsde {

namespace {

void check_problem(const TerminalValue& xi, const Generator& gen,
                   const CondExpBackend& backend) {
    if (xi.m() != gen.m()) {
        throw InvalidArgument("terminal and generator disagree on the value dimension m");
    }
    if (xi.d() != backend.noise_dim() || gen.d() != backend.noise_dim()) {
        throw InvalidArgument("noise dimension mismatch between problem data and backend");
    }
}

}  // namespace

std::vector<Eigen::VectorXd> zero_drift_profile(const Generator& gen, const TimeGrid& grid) {
    std::vector<Eigen::VectorXd> psi(static_cast<std::size_t>(grid.steps) + 1);
    psi[0] = Eigen::VectorXd::Zero(gen.m());
    for (int k = 0; k < grid.steps; ++k) {
        psi[k + 1] = psi[k] + gen.zero_drift(grid.nodes[k]) * grid.dt;
    }
    return psi;
}

TerminalValue shift_terminal(const TerminalValue& xi, const Generator& gen,
                             const TimeGrid& grid) {
    if (xi.m() != gen.m()) {
        throw InvalidArgument("terminal and generator disagree on the value dimension m");
    }
    const Eigen::VectorXd offset = zero_drift_profile(gen, grid).back();
    return xi.shifted_by(offset, offset.norm());
}

DiscreteSolution gamma_step(const DiscreteSolution& input, const TerminalValue& shifted_terminal,
                            const Generator& gen, const CondExpBackend& backend) {
    check_problem(shifted_terminal, gen, backend);
    const TimeGrid& grid = backend.grid();
    if (input.grid.steps != grid.steps || input.m != gen.m() || input.d != gen.d()) {
        throw InvalidArgument("gamma step: input iterate does not match the problem data");
    }

    const int m = gen.m();
    DiscreteSolution out = DiscreteSolution::zero(backend, m);
    out.y[grid.steps] = shifted_terminal.evaluate(backend.states(grid.steps));

    for (int k = grid.steps - 1; k >= 0; --k) {
        const double t = grid.nodes[k];
        const Eigen::VectorXd f0 = gen.zero_drift(t);
        const Eigen::VectorXd& ybar = input.mean_y[k];
        const Eigen::VectorXd& zbar = input.mean_z[k];

        RowMat h(backend.state_count(k), m);
        parallel_for(h.rows(), [&](std::int64_t begin, std::int64_t end) {
            Eigen::VectorXd f(m);
            for (std::int64_t s = begin; s < end; ++s) {
                gen.evaluate(t, row_view(input.y[k], s), ybar, row_view(input.z[k], s), zbar,
                             f);
                row_view(h, s) = f - f0;
            }
        });

        auto [cond, zk] = backend.cond_expect_with_dw(out.y[k + 1], k);
        out.z[k] = std::move(zk);
        out.y[k] = cond + grid.dt * h;
    }
    out.refresh_means(backend);
    return out;
}

PicardOutcome picard_solve(const TerminalValue& xi, const Generator& gen,
                           const CondExpBackend& backend, const PicardParams& params) {
    check_problem(xi, gen, backend);
    if (!(params.tol >= 0.0)) throw InvalidArgument("picard tolerance must be >= 0");
    if (params.max_iter < 1) throw InvalidArgument("picard needs max_iter >= 1");

    const TimeGrid& grid = backend.grid();
    PicardOutcome outcome;
    outcome.shift = zero_drift_profile(gen, grid);
    const TerminalValue shifted_xi = xi.shifted_by(outcome.shift.back().eval(),
                                                   outcome.shift.back().norm());

    DiscreteSolution cur = DiscreteSolution::zero(backend, gen.m());
    PicardReport& report = outcome.report;
    for (int pass = 1; pass <= params.max_iter; ++pass) {
        DiscreteSolution next = gamma_step(cur, shifted_xi, gen, backend);

        // Ball diagnostic in the shifted frame, before de-shifting.
        const double shifted_sup = sup_norm(next.y);
        const BmoEstimate zn = estimate_bmo(next.z, grid, backend);
        report.ball_norms.push_back(shifted_sup * shifted_sup + zn.value * zn.value);

        // Feed the de-shifted iterate back so the fixed point solves the
        // original equation; the means shift by exactly psi.
        for (int k = 0; k <= grid.steps; ++k) {
            next.y[k].rowwise() -= outcome.shift[k].transpose();
            next.mean_y[k] -= outcome.shift[k];
        }

        const double delta = iterate_distance(next, cur, backend);
        report.deltas.push_back(delta);
        if (report.deltas.size() >= 2) {
            const double prev = report.deltas[report.deltas.size() - 2];
            if (prev > 0.0) report.ratios.push_back(delta / prev);
        }
        cur = std::move(next);
        if (delta <= params.tol) {
            report.converged = true;
            report.iterations = pass - 1;
            break;
        }
    }
    if (!report.converged) report.iterations = params.max_iter;
    report.final_residual = report.deltas.back();

    outcome.solution = std::move(cur);
    outcome.solution.refresh_norms(backend);
    return outcome;
}

ResidualReport equation_residuals(const PicardOutcome& outcome, const TerminalValue& xi,
                                  const Generator& gen, const CondExpBackend& backend) {
    const DiscreteSolution& sol = outcome.solution;
    const TimeGrid& grid = sol.grid;
    const int m = sol.m;

    ResidualReport res;
    res.terminal =
        (sol.y[grid.steps] - xi.evaluate(backend.states(grid.steps))).cwiseAbs().maxCoeff();

    for (int k = 0; k < grid.steps; ++k) {
        const double t = grid.nodes[k];
        const Eigen::VectorXd f0 = gen.zero_drift(t);
        RowMat h(sol.y[k].rows(), m);
        parallel_for(h.rows(), [&](std::int64_t begin, std::int64_t end) {
            Eigen::VectorXd f(m);
            for (std::int64_t s = begin; s < end; ++s) {
                gen.evaluate(t, row_view(sol.y[k], s), sol.mean_y[k], row_view(sol.z[k], s),
                             sol.mean_z[k], f);
                row_view(h, s) = f;
            }
        });

        const RowMat cond = backend.cond_expect(sol.y[k + 1], k + 1, k);
        const RowMat defect_original = sol.y[k] - cond - grid.dt * h;
        res.original = std::max(res.original, defect_original.cwiseAbs().maxCoeff());

        // Shifted form: add psi to both slices and subtract f0 from the
        // driver; the psi increments telescope against the f0 term.
        RowMat ys_k = sol.y[k];
        ys_k.rowwise() += outcome.shift[k].transpose();
        RowMat ys_next = sol.y[k + 1];
        ys_next.rowwise() += outcome.shift[k + 1].transpose();
        RowMat hs = h;
        hs.rowwise() -= f0.transpose();
        const RowMat defect_shifted =
            ys_k - backend.cond_expect(ys_next, k + 1, k) - grid.dt * hs;
        res.shifted = std::max(res.shifted, defect_shifted.cwiseAbs().maxCoeff());
    }
    return res;
}

}  // namespace mfbsde

#include "mfbsde/analysis.hpp"

#include <cmath>
#include <sstream>

#include "mfbsde/errors.hpp"
#include "mfbsde/philox.hpp"

namespace mfbsde {

LemmaBoundReport check_lemma_bound(const DiscreteSolution& sol, const Generator& gen,
                                   double m_bound, const CondExpBackend& backend) {
    if (!gen.envelope()) {
        throw UnsupportedConfiguration("lemma bound requires a declared growth envelope");
    }
    if (!(m_bound > 0.0) || !std::isfinite(m_bound)) {
        throw InvalidArgument("lemma bound requires a finite M > 0");
    }

    LemmaBoundReport rep;
    rep.m_bound = m_bound;
    rep.sampled_sup_y = sup_norm(sol.y);
    if (rep.sampled_sup_y > m_bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os.precision(17);
        os << "declared bound M = " << m_bound << " is below the sampled sup |Y| = "
           << rep.sampled_sup_y;
        throw ConfigurationError(os.str());
    }

    const GrowthEnvelope& env = *gen.envelope();
    const double C = gen.quadratic_constant();
    rep.lambda_m = env.lambda(m_bound);
    rep.lambda_bar_m = env.lambda_bar(m_bound);
    rep.k_z2 = env.k_z2_norm(sol.grid.horizon);

    rep.bmo = estimate_bmo(sol.z, sol.grid, backend);
    rep.lhs = rep.bmo.value * rep.bmo.value;

    const double gain = std::exp(8.0 * C * m_bound) / (4.0 * C * C);
    rep.rhs = gain * (1.0 + 4.0 * C * (rep.lambda_m + rep.lambda_bar_m) * rep.k_z2);
    rep.rhs_squared_norm_variant =
        gain * (1.0 + 4.0 * C * (rep.lambda_m + rep.lambda_bar_m) * rep.k_z2 * rep.k_z2);
    rep.pass = rep.lhs <= rep.rhs;
    return rep;
}

DiscreteSolution oracle_solution(const std::string& kind, const TerminalValue& xi,
                                 const CondExpBackend& backend, double param) {
    const TimeGrid& grid = backend.grid();
    const int m = xi.m();
    if (xi.d() != backend.noise_dim()) {
        throw InvalidArgument("oracle: terminal noise dimension does not match the backend");
    }

    DiscreteSolution sol = DiscreteSolution::zero(backend, m);

    if (kind == "zero" || kind == "mean-field-linear") {
        sol.y[grid.steps] = xi.evaluate(backend.states(grid.steps));
        for (int k = grid.steps - 1; k >= 0; --k) {
            auto [cond, zk] = backend.cond_expect_with_dw(sol.y[k + 1], k);
            sol.y[k] = std::move(cond);
            sol.z[k] = std::move(zk);
        }
        if (kind == "mean-field-linear") {
            const double a = param;
            const Eigen::VectorXd mean_xi = backend.expect(sol.y[grid.steps], grid.steps);
            for (int k = 0; k <= grid.steps; ++k) {
                const double growth = std::exp(a * (grid.horizon - grid.nodes[k])) - 1.0;
                sol.y[k].rowwise() += (growth * mean_xi).transpose();
            }
        }
        sol.refresh_means(backend);
        sol.refresh_norms(backend);
        return sol;
    }

    if (kind == "cole-hopf") {
        if (!backend.exact()) {
            throw UnsupportedConfiguration(
                "cole-hopf oracle needs an exact backend (lattice)");
        }
        if (m != 1) throw UnsupportedConfiguration("cole-hopf oracle is scalar (m = 1)");
        const double c = param;
        if (c == 0.0) throw InvalidArgument("cole-hopf oracle needs c != 0");

        RowMat u = xi.evaluate(backend.states(grid.steps));
        u = (2.0 * c * u).array().exp();
        sol.y[grid.steps].col(0) = u.col(0).array().log() / (2.0 * c);
        for (int k = grid.steps - 1; k >= 0; --k) {
            sol.z[k] = backend.cond_expect_dw(sol.y[k + 1], k);
            u = backend.cond_expect(u, k + 1, k);
            sol.y[k].col(0) = u.col(0).array().log() / (2.0 * c);
        }
        sol.refresh_means(backend);
        sol.refresh_norms(backend);
        return sol;
    }

    throw InvalidArgument("unknown oracle kind '" + kind + "'");
}

ComparisonReport compare_solutions(const Generator& first_gen, const TerminalValue& first_xi,
                                   const Generator& second_gen, const TerminalValue& second_xi,
                                   const CondExpBackend& backend, const PicardParams& solver,
                                   const ComparisonCheckParams& params) {
    if (first_gen.m() != 1 || second_gen.m() != 1 || backend.noise_dim() != 1) {
        throw UnsupportedConfiguration("comparison is implemented for m = d = 1");
    }

    // Terminal domination on the backend's own terminal states.
    const RowMat terminal_states = backend.states(backend.grid().steps);
    const RowMat xi_first = first_xi.evaluate(terminal_states);
    const RowMat xi_second = second_xi.evaluate(terminal_states);
    for (Eigen::Index s = 0; s < terminal_states.rows(); ++s) {
        if (xi_first(s, 0) > xi_second(s, 0)) {
            std::ostringstream os;
            os.precision(17);
            os << "terminal domination fails at state " << s << " (W_T = "
               << terminal_states(s, 0) << "): xi = " << xi_first(s, 0) << " > xi~ = "
               << xi_second(s, 0);
            throw HypothesisError(os.str());
        }
    }

    // Driver domination on sampled argument tuples (zbar fixed at 0, as in
    // the rest of the comparison harness).
    const UniformSampler uniform(params.seed, 4);
    Eigen::VectorXd y(1), ybar(1), z(1), zbar(1), fa(1), fb(1);
    zbar[0] = 0.0;
    for (int s = 0; s < params.samples; ++s) {
        const auto sample = static_cast<std::uint32_t>(s);
        const double t = uniform(sample, 0, 0.0, backend.grid().horizon);
        y[0] = uniform(sample, 1, -params.radius, params.radius);
        ybar[0] = uniform(sample, 2, -params.radius, params.radius);
        z[0] = uniform(sample, 3, -params.radius, params.radius);
        first_gen.evaluate(t, y, ybar, z, zbar, fa);
        second_gen.evaluate(t, y, ybar, z, zbar, fb);
        if (fa[0] > fb[0]) {
            std::ostringstream os;
            os.precision(17);
            os << "driver domination fails at t=" << t << ", y=" << y[0] << ", ybar="
               << ybar[0] << ", z=" << z[0] << ": f = " << fa[0] << " > f~ = " << fb[0];
            throw HypothesisError(os.str());
        }
    }

    const PicardOutcome first = picard_solve(first_xi, first_gen, backend, solver);
    const PicardOutcome second = picard_solve(second_xi, second_gen, backend, solver);

    MonotonicityCheckParams mono;
    mono.radius = params.radius;
    mono.samples = params.samples;
    mono.seed = params.seed;
    mono.t_max = backend.grid().horizon;
    ComparisonReport rep;
    rep.hypotheses = check_A1_A2_A3(first_gen, second_gen, first.solution, second.solution,
                                    backend, mono);
    if (!rep.hypotheses.a1) throw HypothesisError("A1 fails: delta_y or delta_ybar not finite");
    if (!rep.hypotheses.a2) throw HypothesisError("A2 fails: delta_z has no finite Z^2 norm");
    if (!rep.hypotheses.a3) {
        throw HypothesisError("A3 fails: neither driver is nondecreasing in ybar; " +
                              rep.hypotheses.a3_witness);
    }

    const int steps = backend.grid().steps;
    rep.profile.assign(static_cast<std::size_t>(steps) + 1, 0.0);
    for (int k = 0; k <= steps; ++k) {
        const double gap =
            (first.solution.y[k] - second.solution.y[k]).col(0).maxCoeff();
        rep.profile[k] = std::max(gap, 0.0);
        rep.max_positive_gap = std::max(rep.max_positive_gap, rep.profile[k]);
    }

    if (params.tolerance >= 0.0) {
        rep.tolerance = params.tolerance;
    } else if (backend.exact()) {
        rep.tolerance = 1e-8;
    } else {
        // Monte Carlo default: three standard errors of the step-wise mean gap.
        double worst_se = 0.0;
        const auto paths = static_cast<double>(backend.state_count(0));
        for (int k = 0; k <= steps; ++k) {
            const Eigen::VectorXd gap = (first.solution.y[k] - second.solution.y[k]).col(0);
            const double mean = gap.mean();
            const double var = (gap.array() - mean).square().sum() / (paths - 1.0);
            worst_se = std::max(worst_se, std::sqrt(var / paths));
        }
        rep.tolerance = 3.0 * worst_se;
    }

    rep.first_y0 = first.solution.mean_y[0][0];
    rep.second_y0 = second.solution.mean_y[0][0];
    rep.holds = rep.max_positive_gap <= rep.tolerance;
    return rep;
}

}  // namespace mfbsde

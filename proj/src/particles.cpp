#include "mfbsde/particles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfbsde/condexp.hpp"
#include "mfbsde/errors.hpp"
#include "mfbsde/parallel.hpp"

namespace mfbsde {

namespace {

// Mean over particles, accumulated in sorted order per entry so the result
// does not depend on particle labels.
RowMat particle_mean(const std::vector<const RowMat*>& slices) {
    const RowMat& head = *slices.front();
    RowMat out(head.rows(), head.cols());
    const auto n = slices.size();
    parallel_for(head.rows(), [&](std::int64_t begin, std::int64_t end) {
        std::vector<double> buf(n);
        for (std::int64_t r = begin; r < end; ++r) {
            for (Eigen::Index c = 0; c < head.cols(); ++c) {
                for (std::size_t i = 0; i < n; ++i) buf[i] = (*slices[i])(r, c);
                std::sort(buf.begin(), buf.end());
                double acc = 0.0;
                for (double v : buf) acc += v;
                out(r, c) = acc / static_cast<double>(n);
            }
        }
    });
    return out;
}

RowMat joint_state(const PathEnsemble& own, const RowMat& mean_w, int step) {
    RowMat state(own.paths, 2 * own.dim);
    state.leftCols(own.dim) = own.cumulative[step];
    state.rightCols(own.dim) = mean_w;
    return state;
}

void validate(const Generator& gen, const TerminalValue& xi, const ParticleConfig& cfg) {
    if (gen.m() != 1 || xi.m() != 1) {
        throw UnsupportedConfiguration("particle system is implemented for m = 1");
    }
    if (gen.d() != cfg.noise_dim || xi.d() != cfg.noise_dim) {
        throw InvalidArgument("particle config noise dimension does not match the problem");
    }
    if (cfg.particles < 1) throw InvalidArgument("particle count must be >= 1");
    if (cfg.grid.steps < 1) throw InvalidArgument("particle config requires a built grid");
    if (cfg.backend == "lattice") {
        if (cfg.particles != 1 || cfg.noise_dim != 1) {
            throw UnsupportedConfiguration(
                "lattice mode for the particle system requires N = 1 and d = 1");
        }
    } else if (cfg.backend != "lsmc") {
        throw InvalidArgument("particle backend must be 'lsmc' or 'lattice'");
    }
    if (cfg.backend == "lsmc" && cfg.paths < 2) {
        throw InvalidArgument("particle system needs at least two sample paths");
    }
    if (!cfg.streams.empty() &&
        static_cast<int>(cfg.streams.size()) != cfg.particles) {
        throw InvalidArgument("stream assignment must list one substream per particle");
    }
}

ParticleSolution solve_lattice_single(const Generator& gen, const TerminalValue& xi,
                                      const ParticleConfig& cfg) {
    const LatticeBackend backend(build_lattice(cfg.grid, cfg.branching));
    const int steps = cfg.grid.steps;
    const double dt = cfg.grid.dt;

    ParticleSolution sol;
    sol.y.assign(1, std::vector<RowMat>(steps + 1));
    sol.z.assign(1, std::vector<RowMat>(steps));
    for (int k = 0; k <= steps; ++k) {
        sol.y[0][k] = RowMat::Zero(backend.state_count(k), 1);
        if (k < steps) sol.z[0][k] = RowMat::Zero(backend.state_count(k), 1);
    }
    const RowMat terminal = xi.evaluate(backend.states(steps));

    Eigen::VectorXd f(1), yv(1);
    for (int pass = 1; pass <= cfg.solver.max_iter; ++pass) {
        std::vector<RowMat> y_next(steps + 1), z_next(steps);
        y_next[steps] = terminal;
        for (int k = steps - 1; k >= 0; --k) {
            auto [cond, zk] = backend.cond_expect_with_dw(y_next[k + 1], k);
            RowMat h(cond.rows(), 1);
            for (Eigen::Index s = 0; s < h.rows(); ++s) {
                yv[0] = sol.y[0][k](s, 0);
                // One particle: the empirical mean is the particle itself.
                gen.evaluate(cfg.grid.nodes[k], yv, yv, row_view(sol.z[0][k], s),
                             row_view(sol.z[0][k], s), f);
                h(s, 0) = f[0];
            }
            z_next[k] = std::move(zk);
            y_next[k] = cond + dt * h;
        }

        double delta = 0.0;
        double zgap = 0.0;
        for (int k = 0; k <= steps; ++k) {
            const double dy = (y_next[k] - sol.y[0][k]).cwiseAbs().maxCoeff();
            delta = std::max(delta, dy);
            if (k < steps) {
                zgap += (z_next[k] - sol.z[0][k]).rowwise().squaredNorm().maxCoeff() * dt;
            }
        }
        delta = delta * delta + zgap;
        sol.y[0] = std::move(y_next);
        sol.z[0] = std::move(z_next);
        sol.deltas.push_back(delta);
        if (delta <= cfg.solver.tol) {
            sol.converged = true;
            sol.iterations = pass - 1;
            break;
        }
    }
    if (!sol.converged) sol.iterations = cfg.solver.max_iter;

    sol.mean_y = sol.y[0];
    sol.mean_z = sol.z[0];
    sol.y0.assign(1, sol.y[0][0](0, 0));
    return sol;
}

}  // namespace

ParticleSolution solve_particles(const Generator& gen, const TerminalValue& xi,
                                 const ParticleConfig& cfg) {
    validate(gen, xi, cfg);
    if (cfg.backend == "lattice") return solve_lattice_single(gen, xi, cfg);

    const int n = cfg.particles;
    const int steps = cfg.grid.steps;
    const int d = cfg.noise_dim;
    const int paths = cfg.paths;
    const double dt = cfg.grid.dt;

    ParticleSolution sol;
    sol.ensembles.reserve(n);
    for (int i = 0; i < n; ++i) {
        const std::uint32_t stream =
            cfg.streams.empty() ? static_cast<std::uint32_t>(i) : cfg.streams[i];
        sol.ensembles.push_back(simulate_paths(cfg.grid, paths, d, cfg.seed, stream));
    }

    // Empirical mean of the driving states, shared by all per-particle bases.
    std::vector<RowMat> mean_w(steps + 1);
    {
        std::vector<const RowMat*> slices(n);
        for (int k = 0; k <= steps; ++k) {
            for (int i = 0; i < n; ++i) slices[i] = &sol.ensembles[i].cumulative[k];
            mean_w[k] = particle_mean(slices);
        }
    }

    std::vector<RowMat> terminal(n);
    for (int i = 0; i < n; ++i) {
        terminal[i] = xi.evaluate(sol.ensembles[i].terminal());
    }

    sol.y.assign(n, std::vector<RowMat>(steps + 1, RowMat::Zero(paths, 1)));
    sol.z.assign(n, std::vector<RowMat>(steps, RowMat::Zero(paths, d)));
    sol.mean_y.assign(steps + 1, RowMat::Zero(paths, 1));
    sol.mean_z.assign(steps, RowMat::Zero(paths, d));

    for (int pass = 1; pass <= cfg.solver.max_iter; ++pass) {
        std::vector<std::vector<RowMat>> y_next(n), z_next(n);
        for (int i = 0; i < n; ++i) {
            y_next[i].resize(steps + 1);
            z_next[i].resize(steps);
            y_next[i][steps] = terminal[i];
        }

        for (int k = steps - 1; k >= 0; --k) {
            const double t = cfg.grid.nodes[k];
            for (int i = 0; i < n; ++i) {
                const PathEnsemble& own = sol.ensembles[i];
                const LeastSquaresProjector proj(
                    monomial_design(joint_state(own, mean_w[k], k), cfg.degree), cfg.ridge,
                    "particle " + std::to_string(i) + ", step " + std::to_string(k));

                RowMat targets(paths, 1 + d);
                targets.col(0) = y_next[i][k + 1].col(0);
                for (int j = 0; j < d; ++j) {
                    targets.col(1 + j) =
                        y_next[i][k + 1].col(0).cwiseProduct(own.increments[k].col(j)) / dt;
                }
                const RowMat fit = proj.fitted(targets);

                RowMat h(paths, 1);
                parallel_for(paths, [&](std::int64_t begin, std::int64_t end) {
                    Eigen::VectorXd f(1), yv(1), ybv(1);
                    for (std::int64_t p = begin; p < end; ++p) {
                        yv[0] = sol.y[i][k](p, 0);
                        ybv[0] = sol.mean_y[k](p, 0);
                        gen.evaluate(t, yv, ybv, row_view(sol.z[i][k], p),
                                     row_view(sol.mean_z[k], p), f);
                        h(p, 0) = f[0];
                    }
                });
                z_next[i][k] = fit.rightCols(d);
                y_next[i][k] = fit.col(0) + dt * h;
            }
        }

        double ygap = 0.0, zgap_worst = 0.0;
        for (int i = 0; i < n; ++i) {
            double zgap = 0.0;
            for (int k = 0; k <= steps; ++k) {
                ygap = std::max(ygap, (y_next[i][k] - sol.y[i][k]).cwiseAbs().maxCoeff());
                if (k < steps) {
                    zgap +=
                        (z_next[i][k] - sol.z[i][k]).rowwise().squaredNorm().maxCoeff() * dt;
                }
            }
            zgap_worst = std::max(zgap_worst, zgap);
        }
        const double delta = ygap * ygap + zgap_worst;

        sol.y = std::move(y_next);
        sol.z = std::move(z_next);
        std::vector<const RowMat*> slices(n);
        for (int k = 0; k <= steps; ++k) {
            for (int i = 0; i < n; ++i) slices[i] = &sol.y[i][k];
            sol.mean_y[k] = particle_mean(slices);
            if (k < steps) {
                for (int i = 0; i < n; ++i) slices[i] = &sol.z[i][k];
                sol.mean_z[k] = particle_mean(slices);
            }
        }

        sol.deltas.push_back(delta);
        if (delta <= cfg.solver.tol) {
            sol.converged = true;
            sol.iterations = pass - 1;
            break;
        }
    }
    if (!sol.converged) sol.iterations = cfg.solver.max_iter;

    sol.y0.resize(n);
    for (int i = 0; i < n; ++i) sol.y0[i] = sol.y[i][0](0, 0);
    return sol;
}

RowMat extract_cross_z(const ParticleSolution& sol, const ParticleConfig& cfg, int i, int j,
                       int step) {
    if (sol.ensembles.empty()) {
        throw UnsupportedConfiguration("cross-block extraction needs Monte Carlo mode");
    }
    const int n = static_cast<int>(sol.ensembles.size());
    if (i < 0 || i >= n || j < 0 || j >= n) {
        throw InvalidArgument("cross-block extraction: particle index out of range");
    }
    if (step < 0 || step >= cfg.grid.steps) {
        throw InvalidArgument("cross-block extraction: step outside the grid");
    }

    const PathEnsemble& own = sol.ensembles[i];
    std::vector<const RowMat*> slices(n);
    for (int p = 0; p < n; ++p) slices[p] = &sol.ensembles[p].cumulative[step];
    const RowMat mean_w = particle_mean(slices);

    const LeastSquaresProjector proj(
        monomial_design(joint_state(own, mean_w, step), cfg.degree), cfg.ridge,
        "cross block (" + std::to_string(i) + "," + std::to_string(j) + "), step " +
            std::to_string(step));

    const RowMat& dw = sol.ensembles[j].increments[step];
    RowMat targets(cfg.paths, cfg.noise_dim);
    for (int c = 0; c < cfg.noise_dim; ++c) {
        targets.col(c) = sol.y[i][step + 1].col(0).cwiseProduct(dw.col(c)) / cfg.grid.dt;
    }
    return proj.fitted(targets);
}

ConvergenceStudy convergence_study(const Generator& gen, const TerminalValue& xi,
                                   const ParticleConfig& base, const std::vector<int>& ladder,
                                   double mean_field_y0) {
    if (ladder.empty()) throw InvalidArgument("convergence study needs a nonempty ladder");
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        if (ladder[i] <= ladder[i - 1]) {
            throw InvalidArgument("convergence study ladder must be strictly increasing");
        }
    }
    if (base.replications < 1) throw InvalidArgument("convergence study needs replications >= 1");

    ConvergenceStudy study;
    study.ladder = ladder;
    study.mean_field_y0 = mean_field_y0;

    for (int count : ladder) {
        double sum_sq = 0.0;
        std::vector<double> gaps;
        gaps.reserve(base.replications);
        for (int rep = 0; rep < base.replications; ++rep) {
            ParticleConfig cfg = base;
            cfg.particles = count;
            cfg.streams.clear();
            cfg.seed = base.seed + static_cast<std::uint64_t>(rep) + 1;
            const ParticleSolution sol = solve_particles(gen, xi, cfg);
            double avg = 0.0;
            for (double v : sol.y0) avg += v;
            avg /= static_cast<double>(count);
            const double gap = avg - mean_field_y0;
            gaps.push_back(gap);
            sum_sq += gap * gap;
        }
        study.rmse.push_back(std::sqrt(sum_sq / gaps.size()));

        double mean = 0.0;
        for (double g : gaps) mean += g;
        mean /= gaps.size();
        double var = 0.0;
        for (double g : gaps) var += (g - mean) * (g - mean);
        var = gaps.size() > 1 ? var / (gaps.size() - 1.0) : 0.0;
        study.stderr_mean.push_back(std::sqrt(var / gaps.size()));
    }

    if (ladder.size() < 2) {
        study.trend = "insufficient data";
    } else {
        bool ok = true;
        for (std::size_t i = 1; i < ladder.size(); ++i) {
            if (study.rmse[i] > study.rmse[i - 1] * 1.05) ok = false;
        }
        study.trend = ok ? "decreasing" : "not-decreasing";
    }
    return study;
}

}  // namespace mfbsde

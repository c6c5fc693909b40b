#include "mfbsde/delta.hpp"

#include <cmath>
#include <sstream>

#include "mfbsde/errors.hpp"
#include "mfbsde/norms.hpp"
#include "mfbsde/philox.hpp"

namespace mfbsde {

namespace {

double eval1(const Generator& gen, double t, double y, double ybar,
             Eigen::Ref<const Eigen::VectorXd> z, const Eigen::VectorXd& zbar) {
    Eigen::VectorXd yv(1), ybarv(1), out(1);
    yv[0] = y;
    ybarv[0] = ybar;
    gen.evaluate(t, yv, ybarv, z, zbar, out);
    return out[0];
}

}  // namespace

DeltaCoefficients delta_coefficients(const Generator& gen, const DiscreteSolution& first,
                                     const DiscreteSolution& second) {
    if (gen.m() != 1 || first.m != 1 || second.m != 1) {
        throw UnsupportedConfiguration("delta coefficients are defined for m = 1");
    }
    if (first.grid.steps != second.grid.steps || first.d != second.d ||
        first.d != gen.d()) {
        throw InvalidArgument("delta coefficients: solutions do not share the problem space");
    }
    const int steps = first.grid.steps;
    const int d = first.d;
    const Eigen::VectorXd zbar = Eigen::VectorXd::Zero(d);

    DeltaCoefficients out;
    out.delta_y.resize(steps);
    out.delta_ybar.resize(steps);
    out.delta_z.resize(steps);
    out.flagged_y.resize(steps);
    out.flagged_ybar.assign(steps, false);
    out.flagged_z.resize(steps);

    for (int k = 0; k < steps; ++k) {
        const double t = first.grid.nodes[k];
        const auto states = static_cast<int>(first.y[k].rows());
        if (second.y[k].rows() != states) {
            throw InvalidArgument("delta coefficients: state counts differ at step " +
                                  std::to_string(k));
        }
        const double mean_first = first.mean_y[k][0];
        const double mean_second = second.mean_y[k][0];
        const double mean_gap = mean_first - mean_second;
        out.flagged_ybar[k] = mean_gap == 0.0;

        out.delta_y[k].resize(states);
        out.delta_ybar[k].resize(states);
        out.delta_z[k].resize(states, d);
        out.flagged_y[k].resize(states);
        out.flagged_z[k].resize(states);

        for (int s = 0; s < states; ++s) {
            const double ya = first.y[k](s, 0);
            const double yb = second.y[k](s, 0);
            const auto za = row_view(first.z[k], s);
            const auto zb = row_view(second.z[k], s);

            const double f_a = eval1(gen, t, ya, mean_first, za, zbar);
            const double f_y = eval1(gen, t, yb, mean_first, za, zbar);
            const double f_ybar = eval1(gen, t, yb, mean_second, za, zbar);
            const double f_z = eval1(gen, t, yb, mean_second, zb, zbar);

            const double y_gap = ya - yb;
            out.flagged_y[k][s] = y_gap == 0.0;
            out.delta_y[k][s] = y_gap == 0.0 ? 0.0 : (f_a - f_y) / y_gap;

            out.delta_ybar[k][s] = out.flagged_ybar[k] ? 0.0 : (f_y - f_ybar) / mean_gap;

            const Eigen::VectorXd z_gap = za - zb;
            const double z_gap2 = z_gap.squaredNorm();
            out.flagged_z[k][s] = z_gap2 == 0.0;
            if (z_gap2 == 0.0) {
                out.delta_z[k].row(s).setZero();
            } else {
                out.delta_z[k].row(s) = ((f_ybar - f_z) / z_gap2) * z_gap.transpose();
            }
        }
    }
    return out;
}

ComparisonHypotheses check_A1_A2_A3(const Generator& first_gen, const Generator& second_gen,
                                    const DiscreteSolution& first, const DiscreteSolution& second,
                                    const CondExpBackend& backend,
                                    const MonotonicityCheckParams& params) {
    const DeltaCoefficients deltas = delta_coefficients(first_gen, first, second);

    ComparisonHypotheses hyp;
    for (const auto& slice : deltas.delta_y) {
        if (slice.size()) hyp.max_delta_y = std::max(hyp.max_delta_y, slice.cwiseAbs().maxCoeff());
    }
    for (const auto& slice : deltas.delta_ybar) {
        if (slice.size()) {
            hyp.max_delta_ybar = std::max(hyp.max_delta_ybar, slice.cwiseAbs().maxCoeff());
        }
    }
    hyp.a1 = std::isfinite(hyp.max_delta_y) && std::isfinite(hyp.max_delta_ybar);

    hyp.delta_z_z2 = estimate_bmo(deltas.delta_z, first.grid, backend).value;
    hyp.a2 = std::isfinite(hyp.delta_z_z2);

    // A3: sampled monotonicity in ybar with everything else held fixed.
    const int d = first.d;
    const UniformSampler uniform(params.seed, 3);
    const Eigen::VectorXd zbar = Eigen::VectorXd::Zero(d);
    hyp.first_monotone = true;
    hyp.second_monotone = true;
    std::ostringstream witness;
    witness.precision(12);
    for (int s = 0; s < params.samples; ++s) {
        const auto sample = static_cast<std::uint32_t>(s);
        const double t = uniform(sample, 0, 0.0, params.t_max);
        const double y = uniform(sample, 1, -params.radius, params.radius);
        Eigen::VectorXd z(d);
        for (int j = 0; j < d; ++j) {
            z[j] = uniform(sample, static_cast<std::uint32_t>(2 + j), -params.radius,
                           params.radius);
        }
        double lo = uniform(sample, static_cast<std::uint32_t>(2 + d), -params.radius,
                            params.radius);
        double hi = uniform(sample, static_cast<std::uint32_t>(3 + d), -params.radius,
                            params.radius);
        if (lo > hi) std::swap(lo, hi);

        const double f_lo = eval1(first_gen, t, y, lo, z, zbar);
        const double f_hi = eval1(first_gen, t, y, hi, z, zbar);
        if (f_lo > f_hi && hyp.first_monotone) {
            hyp.first_monotone = false;
            witness << "f(" << t << ", y=" << y << ", ybar=" << lo << " vs " << hi
                    << "): " << f_lo << " > " << f_hi << "; ";
        }
        const double g_lo = eval1(second_gen, t, y, lo, z, zbar);
        const double g_hi = eval1(second_gen, t, y, hi, z, zbar);
        if (g_lo > g_hi && hyp.second_monotone) {
            hyp.second_monotone = false;
            witness << "f~(" << t << ", y=" << y << ", ybar=" << lo << " vs " << hi
                    << "): " << g_lo << " > " << g_hi << "; ";
        }
    }
    hyp.a3 = hyp.first_monotone || hyp.second_monotone;
    if (!hyp.a3) hyp.a3_witness = witness.str();
    return hyp;
}

}  // namespace mfbsde

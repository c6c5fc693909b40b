#include "mfbsde/generator.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "mfbsde/errors.hpp"
#include "mfbsde/philox.hpp"

namespace mfbsde {

namespace {

std::string format_vector(Eigen::Ref<const Eigen::VectorXd> v) {
    std::ostringstream os;
    os.precision(12);
    os << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    os << ']';
    return os.str();
}

// Quadratic profile clipped to linear growth outside [-r, r]; C^1 at the seam.
double clipped_square(double u, double r) {
    const double a = std::abs(u);
    return a <= r ? u * u : r * (2.0 * a - r);
}

double require_param(const std::map<std::string, double>& params, const std::string& key,
                     double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known, const std::string& name) {
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw InvalidArgument("generator '" + name + "' does not take parameter '" + key +
                                  "'");
        }
    }
}

}  // namespace

double GrowthEnvelope::k_z2_norm(double horizon) const {
    return std::abs(k_level) * std::sqrt(horizon);
}

Generator::Generator(std::string name, int m, int d, double quadratic_constant, Drift drift)
    : name_(std::move(name)), m_(m), d_(d), quad_constant_(quadratic_constant),
      drift_(std::move(drift)) {
    if (m_ < 1 || d_ < 1) throw InvalidArgument("generator dimensions must be >= 1");
    if (!(quad_constant_ > 0.0) || !std::isfinite(quad_constant_)) {
        throw InvalidArgument("generator constant C must be finite and positive");
    }
    if (!drift_) throw InvalidArgument("generator drift callable must be set");
}

void Generator::evaluate(double t, Eigen::Ref<const Eigen::VectorXd> y,
                         Eigen::Ref<const Eigen::VectorXd> ybar,
                         Eigen::Ref<const Eigen::VectorXd> z,
                         Eigen::Ref<const Eigen::VectorXd> zbar,
                         Eigen::Ref<Eigen::VectorXd> out) const {
    if (y.size() != m_ || ybar.size() != m_ || z.size() != m_ * d_ || zbar.size() != m_ * d_ ||
        out.size() != m_) {
        throw InvalidArgument("generator '" + name_ + "' called with mismatched dimensions");
    }
    drift_(t, y, ybar, z, zbar, out);
    if (!out.allFinite()) {
        throw EvaluationError("generator '" + name_ + "' returned a non-finite value at t=" +
                              std::to_string(t) + ", y=" + format_vector(y) + ", ybar=" +
                              format_vector(ybar) + ", z=" + format_vector(z) + ", zbar=" +
                              format_vector(zbar));
    }
}

Eigen::VectorXd Generator::evaluate(double t, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& ybar, const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& zbar) const {
    Eigen::VectorXd out(m_);
    evaluate(t, y, ybar, z, zbar, out);
    return out;
}

Eigen::VectorXd Generator::zero_drift(double t) const {
    const Eigen::VectorXd zero_m = Eigen::VectorXd::Zero(m_);
    const Eigen::VectorXd zero_md = Eigen::VectorXd::Zero(m_ * d_);
    return evaluate(t, zero_m, zero_m, zero_md, zero_md);
}

AssumptionReport check_assumption_A(const Generator& gen, double C,
                                    const AssumptionCheckParams& params) {
    if (params.samples < 1) throw InvalidArgument("assumption check needs samples >= 1");
    if (!(params.radius > 0.0)) throw InvalidArgument("assumption check radius must be > 0");

    const int m = gen.m();
    const int md = gen.m() * gen.d();
    const UniformSampler uniform(params.seed, 1);

    AssumptionReport report;
    Eigen::VectorXd first(2 * m + 2 * md);
    Eigen::VectorXd second(2 * m + 2 * md);
    Eigen::VectorXd f1(m), f2(m);
    for (int s = 0; s < params.samples; ++s) {
        const auto sample = static_cast<std::uint32_t>(s);
        const double t = uniform(sample, 0, 0.0, params.t_max);
        for (Eigen::Index i = 0; i < first.size(); ++i) {
            first[i] = uniform(sample, static_cast<std::uint32_t>(1 + i), -params.radius,
                               params.radius);
            second[i] = uniform(sample, static_cast<std::uint32_t>(1 + first.size() + i),
                                -params.radius, params.radius);
        }

        auto y = [m, md](const Eigen::VectorXd& u) { return u.segment(0, m); };
        auto ybar = [m, md](const Eigen::VectorXd& u) { return u.segment(m, m); };
        auto z = [m, md](const Eigen::VectorXd& u) { return u.segment(2 * m, md); };
        auto zbar = [m, md](const Eigen::VectorXd& u) { return u.segment(2 * m + md, md); };

        gen.evaluate(t, y(first), ybar(first), z(first), zbar(first), f1);
        gen.evaluate(t, y(second), ybar(second), z(second), zbar(second), f2);

        const double arg_sum = y(first).norm() + ybar(first).norm() + z(first).norm() +
                               zbar(first).norm() + y(second).norm() + ybar(second).norm() +
                               z(second).norm() + zbar(second).norm();
        const double diff_sum = (y(first) - y(second)).norm() +
                                (ybar(first) - ybar(second)).norm() +
                                (z(first) - z(second)).norm() +
                                (zbar(first) - zbar(second)).norm();
        const double den = arg_sum * diff_sum;
        if (den == 0.0) continue;

        const double ratio = (f1 - f2).norm() / den;
        if (ratio > report.worst_ratio) {
            report.worst_ratio = ratio;
            report.witness_t = t;
            report.witness_first = first;
            report.witness_second = second;
        }
    }
    report.pass = report.worst_ratio <= C * (1.0 + 1e-9);
    return report;
}

EnvelopeReport check_envelope(const Generator& gen, const AssumptionCheckParams& params) {
    if (!gen.envelope()) {
        throw UnsupportedConfiguration("generator '" + gen.name() +
                                       "' declares no growth envelope");
    }
    const GrowthEnvelope& env = *gen.envelope();
    const int m = gen.m();
    const int md = gen.m() * gen.d();
    const UniformSampler uniform(params.seed, 2);
    const Eigen::VectorXd zbar = Eigen::VectorXd::Zero(md);

    EnvelopeReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    Eigen::VectorXd y(m), ybar(m), z(md), f(m);
    for (int s = 0; s < params.samples; ++s) {
        const auto sample = static_cast<std::uint32_t>(s);
        const double t = uniform(sample, 0, 0.0, params.t_max);
        for (int i = 0; i < m; ++i) {
            y[i] = uniform(sample, static_cast<std::uint32_t>(1 + i), -params.radius,
                           params.radius);
            ybar[i] = uniform(sample, static_cast<std::uint32_t>(1 + m + i), -params.radius,
                              params.radius);
        }
        for (int i = 0; i < md; ++i) {
            z[i] = uniform(sample, static_cast<std::uint32_t>(1 + 2 * m + i), -params.radius,
                           params.radius);
        }
        gen.evaluate(t, y, ybar, z, zbar, f);
        const double k2 = env.k_level * env.k_level;
        const double bound = k2 * (env.lambda(y.norm()) + env.lambda_bar(ybar.norm())) +
                             gen.quadratic_constant() * z.squaredNorm();
        report.worst_margin = std::min(report.worst_margin, bound - f.norm());
    }
    report.pass = report.worst_margin >= -1e-12;
    return report;
}

Generator make_catalog_generator(const std::string& name,
                                 const std::map<std::string, double>& params, double C,
                                 int noise_dim) {
    const int d = noise_dim;
    if (d < 1) throw InvalidArgument("catalog generator noise dimension must be >= 1");

    if (name == "zero") {
        reject_unknown(params, {}, name);
        Generator gen(name, 1, d, C,
                      [](double, Eigen::Ref<const Eigen::VectorXd>,
                         Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<const Eigen::VectorXd>,
                         Eigen::Ref<const Eigen::VectorXd>,
                         Eigen::Ref<Eigen::VectorXd> out) { out.setZero(); });
        gen.set_envelope(GrowthEnvelope{});
        return gen;
    }

    if (name == "linear-mean-field") {
        reject_unknown(params, {"a"}, name);
        const double a = require_param(params, "a", 0.5);
        Generator gen(name, 1, d, C,
                      [a](double, Eigen::Ref<const Eigen::VectorXd>,
                          Eigen::Ref<const Eigen::VectorXd> ybar,
                          Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<const Eigen::VectorXd>,
                          Eigen::Ref<Eigen::VectorXd> out) { out = a * ybar; });
        GrowthEnvelope env;
        env.lambda_bar_coef = Eigen::Vector3d(0.0, std::abs(a), 0.0);
        env.k_level = 1.0;
        gen.set_envelope(env);
        return gen;
    }

    if (name == "quadratic-z") {
        reject_unknown(params, {"c"}, name);
        const double c = require_param(params, "c", 1.0);
        Generator gen(name, 1, d, C,
                      [c](double, Eigen::Ref<const Eigen::VectorXd>,
                          Eigen::Ref<const Eigen::VectorXd>,
                          Eigen::Ref<const Eigen::VectorXd> z,
                          Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::VectorXd> out) {
                          out[0] = c * z.squaredNorm();
                      });
        if (std::abs(c) <= C) {
            GrowthEnvelope env;
            env.k_level = 0.0;
            gen.set_envelope(env);
        }
        return gen;
    }

    if (name == "paper-example") {
        reject_unknown(params, {}, name);
        return Generator(name, 1, d, C,
                         [](double, Eigen::Ref<const Eigen::VectorXd> y,
                            Eigen::Ref<const Eigen::VectorXd> ybar,
                            Eigen::Ref<const Eigen::VectorXd> z,
                            Eigen::Ref<const Eigen::VectorXd> zbar,
                            Eigen::Ref<Eigen::VectorXd> out) {
                             out[0] = y[0] * y[0] + ybar[0] * ybar[0] + z.squaredNorm() +
                                      zbar.squaredNorm();
                         });
    }

    if (name == "clipped-quadratic") {
        reject_unknown(params, {"radius", "y_coef", "ybar_coef", "z_coef", "zbar_coef"}, name);
        const double r = require_param(params, "radius", 1.0);
        if (!(r > 0.0)) throw InvalidArgument("clipped-quadratic radius must be > 0");
        const double ay = require_param(params, "y_coef", 1.0);
        const double aybar = require_param(params, "ybar_coef", 1.0);
        const double az = require_param(params, "z_coef", 1.0);
        const double azbar = require_param(params, "zbar_coef", 1.0);
        Generator gen(name, 1, d, C,
                      [r, ay, aybar, az, azbar](double, Eigen::Ref<const Eigen::VectorXd> y,
                                                Eigen::Ref<const Eigen::VectorXd> ybar,
                                                Eigen::Ref<const Eigen::VectorXd> z,
                                                Eigen::Ref<const Eigen::VectorXd> zbar,
                                                Eigen::Ref<Eigen::VectorXd> out) {
                          out[0] = ay * clipped_square(y[0], r) +
                                   aybar * clipped_square(ybar[0], r) +
                                   az * clipped_square(z.norm(), r) +
                                   azbar * clipped_square(zbar.norm(), r);
                      });
        if (azbar == 0.0 && std::abs(az) <= C) {
            GrowthEnvelope env;
            env.lambda_coef = Eigen::Vector3d(0.0, 0.0, std::abs(ay));
            env.lambda_bar_coef = Eigen::Vector3d(0.0, 0.0, std::abs(aybar));
            env.k_level = 1.0;
            gen.set_envelope(env);
        }
        return gen;
    }

    if (name == "affine") {
        reject_unknown(params, {"const", "y_coef", "ybar_coef", "z_coef"}, name);
        const double c0 = require_param(params, "const", 0.0);
        const double by = require_param(params, "y_coef", 0.0);
        const double aybar = require_param(params, "ybar_coef", 0.0);
        const double cz = require_param(params, "z_coef", 0.0);
        Generator gen(name, 1, d, C,
                      [c0, by, aybar, cz](double, Eigen::Ref<const Eigen::VectorXd> y,
                                          Eigen::Ref<const Eigen::VectorXd> ybar,
                                          Eigen::Ref<const Eigen::VectorXd> z,
                                          Eigen::Ref<const Eigen::VectorXd>,
                                          Eigen::Ref<Eigen::VectorXd> out) {
                          out[0] = c0 + by * y[0] + aybar * ybar[0] + cz * z.sum();
                      });
        GrowthEnvelope env;
        env.lambda_coef =
            Eigen::Vector3d(std::abs(c0) + cz * cz * d / (4.0 * C), std::abs(by), 0.0);
        env.lambda_bar_coef = Eigen::Vector3d(0.0, std::abs(aybar), 0.0);
        env.k_level = 1.0;
        gen.set_envelope(env);
        return gen;
    }

    throw InvalidArgument("unknown generator '" + name + "'");
}

}  // namespace mfbsde

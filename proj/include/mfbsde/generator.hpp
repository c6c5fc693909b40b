#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "mfbsde/types.hpp"

namespace mfbsde {

// Growth envelope |f(t, y, ybar, z)| <= k^2 [lambda(|y|) + lambda_bar(|ybar|)]
// + C |z|^2 with polynomial lambda(r) = c0 + c1 r + c2 r^2 and a constant
// level for the process k. Declaring one marks the generator as eligible for
// the BMO lemma harness (which covers zbar-independent drifts only).
struct GrowthEnvelope {
    Eigen::Vector3d lambda_coef = Eigen::Vector3d::Zero();
    Eigen::Vector3d lambda_bar_coef = Eigen::Vector3d::Zero();
    double k_level = 0.0;

    double lambda(double r) const {
        return lambda_coef[0] + lambda_coef[1] * r + lambda_coef[2] * r * r;
    }
    double lambda_bar(double r) const {
        return lambda_bar_coef[0] + lambda_bar_coef[1] * r + lambda_bar_coef[2] * r * r;
    }
    // Z^2 norm of the constant process k over [0, T].
    double k_z2_norm(double horizon) const;
};

// Driver f(t, y, ybar, z, zbar) of the mean-field equation. y and ybar are
// m-vectors; z and zbar are m x d matrices flattened row-major, so component
// (i, j) sits at index i*d + j and for m = 1 the argument is just the d-vector.
class Generator {
  public:
    using Drift = std::function<void(double t, Eigen::Ref<const Eigen::VectorXd> y,
                                     Eigen::Ref<const Eigen::VectorXd> ybar,
                                     Eigen::Ref<const Eigen::VectorXd> z,
                                     Eigen::Ref<const Eigen::VectorXd> zbar,
                                     Eigen::Ref<Eigen::VectorXd> out)>;

    Generator(std::string name, int m, int d, double quadratic_constant, Drift drift);

    const std::string& name() const { return name_; }
    int m() const { return m_; }
    int d() const { return d_; }
    double quadratic_constant() const { return quad_constant_; }

    const std::optional<GrowthEnvelope>& envelope() const { return envelope_; }
    void set_envelope(GrowthEnvelope env) { envelope_ = env; }

    // Evaluates the drift; throws EvaluationError (with the offending
    // arguments in the message) if the result is not finite.
    void evaluate(double t, Eigen::Ref<const Eigen::VectorXd> y,
                  Eigen::Ref<const Eigen::VectorXd> ybar,
                  Eigen::Ref<const Eigen::VectorXd> z,
                  Eigen::Ref<const Eigen::VectorXd> zbar,
                  Eigen::Ref<Eigen::VectorXd> out) const;

    Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& ybar,
                             const Eigen::VectorXd& z, const Eigen::VectorXd& zbar) const;

    // f(t, 0, 0, 0, 0) through the same evaluation path as evaluate().
    Eigen::VectorXd zero_drift(double t) const;

  private:
    std::string name_;
    int m_;
    int d_;
    double quad_constant_;
    Drift drift_;
    std::optional<GrowthEnvelope> envelope_;
};

// Randomized check of the structure condition
//   |f(u1) - f(u2)| <= C (sum of block norms of u1, u2) (sum of block diffs)
// over tuples drawn uniformly from [-radius, radius] per coordinate.
struct AssumptionCheckParams {
    double radius = 1.0;
    int samples = 4096;
    std::uint64_t seed = 0;
    double t_max = 1.0;
};

struct AssumptionReport {
    double worst_ratio = 0.0;
    bool pass = false;
    // Worst tuple, for failure forensics: t, y1, ybar1, z1, zbar1, y2, ...
    double witness_t = 0.0;
    Eigen::VectorXd witness_first;
    Eigen::VectorXd witness_second;
};

AssumptionReport check_assumption_A(const Generator& gen, double C,
                                    const AssumptionCheckParams& params);

// Spot check of envelope dominance |f(t, y, ybar, z, 0)| <= envelope over a
// sampled box; returns the worst margin (negative means a violation).
struct EnvelopeReport {
    double worst_margin = 0.0;
    bool pass = false;
};

EnvelopeReport check_envelope(const Generator& gen, const AssumptionCheckParams& params);

// Named catalog used by scenario files; unknown names or parameters are
// rejected. Parameter defaults are documented in docs/scenario_schema.md.
Generator make_catalog_generator(const std::string& name,
                                 const std::map<std::string, double>& params, double C,
                                 int noise_dim);

}  // namespace mfbsde

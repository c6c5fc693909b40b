#include "mfbsde/terminal.hpp"

#include <cmath>
#include <utility>

#include "mfbsde/errors.hpp"
#include "mfbsde/parallel.hpp"

namespace mfbsde {

TerminalValue::TerminalValue(std::string name, int m, int d, double sup_bound, Payoff payoff)
    : name_(std::move(name)), m_(m), d_(d), sup_bound_(sup_bound), payoff_(std::move(payoff)) {
    if (m_ < 1 || d_ < 1) throw InvalidArgument("terminal dimensions must be >= 1");
    if (!(sup_bound_ >= 0.0) || !std::isfinite(sup_bound_)) {
        throw InvalidArgument("terminal sup bound must be finite and nonnegative");
    }
    if (!payoff_) throw InvalidArgument("terminal payoff callable must be set");
}

RowMat TerminalValue::evaluate(const RowMat& terminal_states) const {
    if (terminal_states.cols() != d_) {
        throw InvalidArgument("terminal '" + name_ + "' expects " + std::to_string(d_) +
                              " state coordinates");
    }
    RowMat out(terminal_states.rows(), m_);
    parallel_for(terminal_states.rows(), [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t s = begin; s < end; ++s) {
            payoff_(row_view(terminal_states, s), row_view(out, s));
        }
    });
    if (!out.allFinite()) {
        throw EvaluationError("terminal '" + name_ + "' produced a non-finite value");
    }
    return out;
}

TerminalValue TerminalValue::shifted_by(const Eigen::VectorXd& offset,
                                        double bound_increment) const {
    if (offset.size() != m_) throw InvalidArgument("terminal shift has wrong dimension");
    if (!(bound_increment >= 0.0)) {
        throw InvalidArgument("terminal shift bound increment must be >= 0");
    }
    Payoff base = payoff_;
    Eigen::VectorXd delta = offset;
    return TerminalValue(name_ + "+shift", m_, d_, sup_bound_ + bound_increment,
                         [base, delta](Eigen::Ref<const Eigen::VectorXd> w,
                                       Eigen::Ref<Eigen::VectorXd> out) {
                             base(w, out);
                             out += delta;
                         });
}

TerminalValue TerminalValue::with_sup_bound(double sup_bound) const {
    return TerminalValue(name_, m_, d_, sup_bound, payoff_);
}

TerminalValue make_catalog_terminal(const std::string& name,
                                    const std::map<std::string, double>& params,
                                    int noise_dim) {
    auto get = [&params](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    auto reject_unknown = [&params, &name](std::initializer_list<const char*> known) {
        for (const auto& [key, value] : params) {
            bool ok = false;
            for (const char* k : known) {
                if (key == k) {
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                throw InvalidArgument("terminal '" + name + "' does not take parameter '" +
                                      key + "'");
            }
        }
    };

    if (name == "constant") {
        reject_unknown({"value"});
        const double v = get("value", 0.0);
        return TerminalValue(name, 1, noise_dim, std::abs(v),
                             [v](Eigen::Ref<const Eigen::VectorXd>,
                                 Eigen::Ref<Eigen::VectorXd> out) { out[0] = v; });
    }

    if (name == "digital") {
        reject_unknown({"threshold", "scale"});
        const double threshold = get("threshold", 0.0);
        const double scale = get("scale", 1.0);
        // States exactly on the threshold get half weight: recombining lattices
        // put an atom there, and the symmetric convention keeps the lattice
        // expectation aligned with the atomless Brownian law. Monte Carlo
        // paths hit the threshold with probability zero, so they never see it.
        return TerminalValue(name, 1, noise_dim, std::abs(scale),
                             [threshold, scale](Eigen::Ref<const Eigen::VectorXd> w,
                                                Eigen::Ref<Eigen::VectorXd> out) {
                                 if (w[0] > threshold) {
                                     out[0] = scale;
                                 } else if (w[0] == threshold) {
                                     out[0] = 0.5 * scale;
                                 } else {
                                     out[0] = 0.0;
                                 }
                             });
    }

    if (name == "tanh") {
        reject_unknown({"scale", "slope"});
        const double scale = get("scale", 1.0);
        const double slope = get("slope", 1.0);
        return TerminalValue(name, 1, noise_dim, std::abs(scale),
                             [scale, slope](Eigen::Ref<const Eigen::VectorXd> w,
                                            Eigen::Ref<Eigen::VectorXd> out) {
                                 out[0] = scale * std::tanh(slope * w[0]);
                             });
    }

    throw InvalidArgument("unknown terminal '" + name + "'");
}

}  // namespace mfbsde

#pragma once

#include <stdexcept>
#include <string>

namespace mfbsde {

// All library failures derive from Error and carry a stable machine-readable
// code so the CLI can render structured diagnostics without string matching.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

class InvalidArgument : public Error {
  public:
    explicit InvalidArgument(const std::string& message)
        : Error("invalid-argument", message) {}
};

class UnsupportedConfiguration : public Error {
  public:
    explicit UnsupportedConfiguration(const std::string& message)
        : Error("unsupported-configuration", message) {}
};

// Declared scenario data contradicts sampled reality (stale sup bounds etc.).
class ConfigurationError : public Error {
  public:
    explicit ConfigurationError(const std::string& message)
        : Error("configuration-error", message) {}
};

// Generator or terminal produced a non-finite value; message lists the
// offending arguments so the failure is reproducible.
class EvaluationError : public Error {
  public:
    explicit EvaluationError(const std::string& message)
        : Error("evaluation-error", message) {}
};

class IllConditionedRegression : public Error {
  public:
    IllConditionedRegression(const std::string& message, double condition)
        : Error("ill-conditioned-regression", message), condition_(condition) {}

    double condition_number() const { return condition_; }

  private:
    double condition_;
};

// A theorem hypothesis failed on sampled data; message carries the witness.
class HypothesisError : public Error {
  public:
    explicit HypothesisError(const std::string& message)
        : Error("hypothesis-error", message) {}
};

class SchemaError : public Error {
  public:
    explicit SchemaError(const std::string& message)
        : Error("schema-error", message) {}
};

}  // namespace mfbsde

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfbsde/picard.hpp"

namespace mfbsde {

// Parsed scenario file. The schema is strict: unknown keys are rejected with
// their full path, and every default is listed in docs/scenario_schema.md.
struct GeneratorSpec {
    std::string name;
    std::map<std::string, double> params;
    double C = 1.0;
    double zero_drift_integral_bound = -1.0;  // < 0: use the grid quadrature
};

struct TerminalSpec {
    std::string name;
    std::map<std::string, double> params;
    double sup_bound = -1.0;  // < 0: catalog bound
};

struct BackendSpec {
    std::string kind = "lattice";  // "lattice" | "lsmc"
    int branching = 2;
    int noise_dim = 1;
    int paths = 10000;
    int degree = 3;
    double ridge = 1e-10;
    std::uint64_t seed = 0;
};

struct CompareSpec {
    GeneratorSpec second_generator;
    TerminalSpec second_terminal;
    double tolerance = -1.0;
    int samples = 512;
    double radius = 1.0;
    std::uint64_t seed = 0;
};

struct LemmaSpec {
    double m_bound = 0.0;
};

struct OracleSpec {
    std::string kind;
    double param = 0.0;
};

struct ParticleSpec {
    int count = 2;
    std::string backend = "lsmc";
    int branching = 2;
    int paths = 2000;
    int degree = 2;
    double ridge = 1e-10;
    std::vector<int> ladder;
    int replications = 8;
    PicardParams solver{1e-12, 200};
};

struct Scenario {
    std::optional<std::string> task;
    double horizon = 1.0;
    int steps = 1;
    GeneratorSpec generator;
    TerminalSpec terminal;
    BackendSpec backend;
    PicardParams solver{-1.0, 50};  // tol < 0: 1e-8 lattice, 1e-5 lsmc
    std::optional<CompareSpec> compare;
    std::optional<LemmaSpec> lemma;
    std::optional<OracleSpec> oracle;
    std::optional<ParticleSpec> particles;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

struct RunResult {
    int exit_code = 0;
    std::string summary_json;  // printed to stdout by the CLI
};

// Executes one task on a scenario. `task` must be one of solve, certify,
// compare, bmo, lemma-check, particles, oracle-diff and must agree with the
// scenario's own task field when that is present. CSV profiles land in
// out_dir (created on demand); pass an empty out_dir to skip them.
// seed_override, when nonnegative, replaces the backend and particle seeds.
RunResult run_task(const std::string& task, const Scenario& scenario,
                   const std::string& out_dir, std::int64_t seed_override = -1);

}  // namespace mfbsde

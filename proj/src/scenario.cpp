#include "mfbsde/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "mfbsde/admissibility.hpp"
#include "mfbsde/analysis.hpp"
#include "mfbsde/condexp.hpp"
#include "mfbsde/errors.hpp"
#include "mfbsde/norms.hpp"
#include "mfbsde/particles.hpp"
#include "mfbsde/path_ensemble.hpp"
#include "mfbsde/picard.hpp"

namespace mfbsde {
namespace {

using Json = nlohmann::ordered_json;

std::string joined(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void expect_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError("key '" + path + "' must be an object");
}

void check_keys(const Json& j, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) throw SchemaError("unknown key '" + joined(prefix, item.key()) + "'");
    }
}

double get_double(const Json& j, const std::string& prefix, const char* key) {
    if (!j.contains(key)) {
        throw SchemaError("missing required key '" + joined(prefix, key) + "'");
    }
    const Json& v = j.at(key);
    if (!v.is_number()) throw SchemaError("key '" + joined(prefix, key) + "' must be a number");
    return v.get<double>();
}

double get_double_or(const Json& j, const std::string& prefix, const char* key,
                     double fallback) {
    return j.contains(key) ? get_double(j, prefix, key) : fallback;
}

int get_int(const Json& j, const std::string& prefix, const char* key) {
    if (!j.contains(key)) {
        throw SchemaError("missing required key '" + joined(prefix, key) + "'");
    }
    const Json& v = j.at(key);
    if (!v.is_number_integer()) {
        throw SchemaError("key '" + joined(prefix, key) + "' must be an integer");
    }
    return v.get<int>();
}

int get_int_or(const Json& j, const std::string& prefix, const char* key, int fallback) {
    return j.contains(key) ? get_int(j, prefix, key) : fallback;
}

std::uint64_t get_seed_or(const Json& j, const std::string& prefix, const char* key,
                          std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0)) {
        throw SchemaError("key '" + joined(prefix, key) + "' must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

std::string get_string(const Json& j, const std::string& prefix, const char* key) {
    if (!j.contains(key)) {
        throw SchemaError("missing required key '" + joined(prefix, key) + "'");
    }
    const Json& v = j.at(key);
    if (!v.is_string()) throw SchemaError("key '" + joined(prefix, key) + "' must be a string");
    return v.get<std::string>();
}

std::map<std::string, double> parse_params(const Json& j, const std::string& prefix) {
    expect_object(j, prefix);
    std::map<std::string, double> out;
    for (const auto& item : j.items()) {
        if (!item.value().is_number()) {
            throw SchemaError("key '" + joined(prefix, item.key()) + "' must be a number");
        }
        out[item.key()] = item.value().get<double>();
    }
    return out;
}

GeneratorSpec parse_generator(const Json& j, const std::string& prefix) {
    expect_object(j, prefix);
    check_keys(j, prefix, {"name", "params", "C", "zero_drift_integral_bound"});
    GeneratorSpec spec;
    spec.name = get_string(j, prefix, "name");
    spec.C = get_double(j, prefix, "C");
    spec.zero_drift_integral_bound =
        get_double_or(j, prefix, "zero_drift_integral_bound", -1.0);
    if (j.contains("zero_drift_integral_bound") && spec.zero_drift_integral_bound < 0.0) {
        throw SchemaError("key '" + joined(prefix, "zero_drift_integral_bound") +
                          "' must be nonnegative");
    }
    if (j.contains("params")) spec.params = parse_params(j.at("params"), joined(prefix, "params"));
    return spec;
}

TerminalSpec parse_terminal(const Json& j, const std::string& prefix) {
    expect_object(j, prefix);
    check_keys(j, prefix, {"name", "params", "sup_bound"});
    TerminalSpec spec;
    spec.name = get_string(j, prefix, "name");
    spec.sup_bound = get_double_or(j, prefix, "sup_bound", -1.0);
    if (j.contains("sup_bound") && spec.sup_bound < 0.0) {
        throw SchemaError("key '" + joined(prefix, "sup_bound") + "' must be nonnegative");
    }
    if (j.contains("params")) spec.params = parse_params(j.at("params"), joined(prefix, "params"));
    return spec;
}

BackendSpec parse_backend(const Json& j, const std::string& prefix) {
    expect_object(j, prefix);
    check_keys(j, prefix, {"kind", "branching", "noise_dim", "paths", "degree", "ridge", "seed"});
    BackendSpec spec;
    if (j.contains("kind")) spec.kind = get_string(j, prefix, "kind");
    if (spec.kind != "lattice" && spec.kind != "lsmc") {
        throw SchemaError("key '" + joined(prefix, "kind") +
                          "' must be \"lattice\" or \"lsmc\"");
    }
    spec.branching = get_int_or(j, prefix, "branching", 2);
    spec.noise_dim = get_int_or(j, prefix, "noise_dim", 1);
    spec.paths = get_int_or(j, prefix, "paths", 10000);
    spec.degree = get_int_or(j, prefix, "degree", 3);
    spec.ridge = get_double_or(j, prefix, "ridge", 1e-10);
    spec.seed = get_seed_or(j, prefix, "seed", 0);
    if (spec.kind == "lattice" && spec.noise_dim != 1) {
        throw SchemaError("key '" + joined(prefix, "noise_dim") +
                          "' must be 1 for the lattice backend");
    }
    return spec;
}

PicardParams parse_solver(const Json& j, const std::string& prefix, PicardParams fallback) {
    expect_object(j, prefix);
    check_keys(j, prefix, {"tol", "max_iter"});
    PicardParams p = fallback;
    p.tol = get_double_or(j, prefix, "tol", fallback.tol);
    p.max_iter = get_int_or(j, prefix, "max_iter", fallback.max_iter);
    return p;
}

CompareSpec parse_compare(const Json& j, const std::string& prefix) {
    expect_object(j, prefix);
    check_keys(j, prefix,
               {"second_generator", "second_terminal", "tolerance", "samples", "radius", "seed"});
    CompareSpec spec;
    if (!j.contains("second_generator")) {
        throw SchemaError("missing required key '" + joined(prefix, "second_generator") + "'");
    }
    if (!j.contains("second_terminal")) {
        throw SchemaError("missing required key '" + joined(prefix, "second_terminal") + "'");
    }
    spec.second_generator =
        parse_generator(j.at("second_generator"), joined(prefix, "second_generator"));
    spec.second_terminal =
        parse_terminal(j.at("second_terminal"), joined(prefix, "second_terminal"));
    spec.tolerance = get_double_or(j, prefix, "tolerance", -1.0);
    spec.samples = get_int_or(j, prefix, "samples", 512);
    spec.radius = get_double_or(j, prefix, "radius", 1.0);
    spec.seed = get_seed_or(j, prefix, "seed", 0);
    return spec;
}

ParticleSpec parse_particles(const Json& j, const std::string& prefix) {
    expect_object(j, prefix);
    check_keys(j, prefix,
               {"count", "backend", "branching", "paths", "degree", "ridge", "ladder",
                "replications", "solver"});
    ParticleSpec spec;
    spec.count = get_int_or(j, prefix, "count", 2);
    if (j.contains("backend")) spec.backend = get_string(j, prefix, "backend");
    if (spec.backend != "lattice" && spec.backend != "lsmc") {
        throw SchemaError("key '" + joined(prefix, "backend") +
                          "' must be \"lattice\" or \"lsmc\"");
    }
    spec.branching = get_int_or(j, prefix, "branching", 2);
    spec.paths = get_int_or(j, prefix, "paths", 2000);
    spec.degree = get_int_or(j, prefix, "degree", 2);
    spec.ridge = get_double_or(j, prefix, "ridge", 1e-10);
    spec.replications = get_int_or(j, prefix, "replications", 8);
    if (j.contains("ladder")) {
        const Json& arr = j.at("ladder");
        if (!arr.is_array()) {
            throw SchemaError("key '" + joined(prefix, "ladder") + "' must be an array");
        }
        for (const Json& v : arr) {
            if (!v.is_number_integer()) {
                throw SchemaError("key '" + joined(prefix, "ladder") +
                                  "' must contain integers");
            }
            spec.ladder.push_back(v.get<int>());
        }
    }
    if (j.contains("solver")) {
        spec.solver = parse_solver(j.at("solver"), joined(prefix, "solver"), spec.solver);
    }
    return spec;
}

// ---------------------------------------------------------------------------

struct BuiltBackend {
    std::unique_ptr<PathEnsemble> ensemble;
    std::unique_ptr<CondExpBackend> backend;
};

BuiltBackend build_backend(const Scenario& sc, std::int64_t seed_override) {
    BuiltBackend out;
    TimeGrid grid = build_grid(sc.horizon, sc.steps);
    const BackendSpec& b = sc.backend;
    if (b.kind == "lattice") {
        out.backend = make_lattice_backend(grid, b.branching);
    } else {
        const std::uint64_t seed =
            seed_override >= 0 ? static_cast<std::uint64_t>(seed_override) : b.seed;
        out.ensemble =
            std::make_unique<PathEnsemble>(simulate_paths(grid, b.paths, b.noise_dim, seed));
        out.backend = std::make_unique<RegressionBackend>(*out.ensemble, b.degree, b.ridge);
    }
    return out;
}

Generator build_generator(const GeneratorSpec& spec, int noise_dim) {
    return make_catalog_generator(spec.name, spec.params, spec.C, noise_dim);
}

TerminalValue build_terminal(const TerminalSpec& spec, int noise_dim) {
    TerminalValue xi = make_catalog_terminal(spec.name, spec.params, noise_dim);
    if (spec.sup_bound >= 0.0) xi = xi.with_sup_bound(spec.sup_bound);
    return xi;
}

PicardParams resolved_solver(const Scenario& sc) {
    PicardParams p = sc.solver;
    if (p.tol < 0.0) p.tol = sc.backend.kind == "lattice" ? 1e-8 : 1e-5;
    return p;
}

// ---------------------------------------------------------------------------

Json vec_json(const Eigen::VectorXd& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Json list_json(const std::vector<double>& v) { return Json(v); }

Json check_json(const CheckLine& line) {
    Json j;
    j["lhs"] = line.lhs;
    j["rhs"] = line.rhs;
    j["pass"] = line.pass;
    return j;
}

std::ofstream open_csv(const std::string& out_dir, const std::string& file) {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / file;
    std::ofstream out(path);
    if (!out) throw ConfigurationError("cannot write '" + path.string() + "'");
    out << std::setprecision(17);
    return out;
}

void write_solution_csv(const DiscreteSolution& sol, const std::string& out_dir) {
    if (out_dir.empty()) return;
    std::ofstream out = open_csv(out_dir, "solution_profile.csv");
    out << "time";
    for (int i = 0; i < sol.m; ++i) out << ",mean_y_" << i;
    for (int i = 0; i < sol.m; ++i) {
        for (int j = 0; j < sol.d; ++j) out << ",mean_z_" << i << "_" << j;
    }
    out << ",sup_y_running\n";
    double running = 0.0;
    const int steps = sol.grid.steps;
    for (int k = 0; k <= steps; ++k) {
        running = std::max(running, sol.y[k].rowwise().norm().maxCoeff());
        out << sol.grid.nodes[k];
        for (int i = 0; i < sol.m; ++i) out << ',' << sol.mean_y[k][i];
        for (int c = 0; c < sol.m * sol.d; ++c) {
            out << ',';
            if (k < steps) out << sol.mean_z[k][c];
        }
        out << ',' << running << '\n';
    }
}

void write_profile_csv(const std::string& out_dir, const std::string& file,
                       const std::string& column, const TimeGrid& grid,
                       const std::vector<double>& profile) {
    if (out_dir.empty()) return;
    std::ofstream out = open_csv(out_dir, file);
    out << "time," << column << "\n";
    for (std::size_t k = 0; k < profile.size(); ++k) {
        out << grid.nodes[k] << ',' << profile[k] << '\n';
    }
}

// ---------------------------------------------------------------------------

struct SolveArtifacts {
    BuiltBackend built;
    Generator gen;
    TerminalValue xi;
    PicardOutcome outcome;
};

SolveArtifacts run_picard(const Scenario& sc, std::int64_t seed_override) {
    BuiltBackend built = build_backend(sc, seed_override);
    const int d = built.backend->noise_dim();
    Generator gen = build_generator(sc.generator, d);
    TerminalValue xi = build_terminal(sc.terminal, d);
    PicardOutcome outcome = picard_solve(xi, gen, *built.backend, resolved_solver(sc));
    return SolveArtifacts{std::move(built), std::move(gen), std::move(xi), std::move(outcome)};
}

Json solve_header(const Scenario& sc, const SolveArtifacts& art, const char* task) {
    Json j;
    j["task"] = task;
    j["backend"] = sc.backend.kind;
    j["grid"] = Json{{"horizon", sc.horizon}, {"steps", sc.steps}};
    j["generator"] = art.gen.name();
    j["terminal"] = art.xi.name();
    return j;
}

std::pair<int, Json> run_solve(const Scenario& sc, const std::string& out_dir,
                               std::int64_t seed_override) {
    SolveArtifacts art = run_picard(sc, seed_override);
    const PicardReport& rep = art.outcome.report;
    ResidualReport res = equation_residuals(art.outcome, art.xi, art.gen, *art.built.backend);

    Json j = solve_header(sc, art, "solve");
    j["y0"] = vec_json(art.outcome.solution.mean_y[0]);
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["final_residual"] = rep.final_residual;
    j["deltas"] = list_json(rep.deltas);
    j["ratios"] = list_json(rep.ratios);
    j["ball_norms"] = list_json(rep.ball_norms);
    j["norms"] = Json{{"sup_y", art.outcome.solution.norms.sup_y},
                      {"z2", art.outcome.solution.norms.z2}};
    j["residuals"] =
        Json{{"original", res.original}, {"shifted", res.shifted}, {"terminal", res.terminal}};
    write_solution_csv(art.outcome.solution, out_dir);
    return {rep.converged ? 0 : 1, j};
}

std::pair<int, Json> run_certify(const Scenario& sc, std::int64_t seed_override) {
    BuiltBackend built = build_backend(sc, seed_override);
    const int d = built.backend->noise_dim();
    Generator gen = build_generator(sc.generator, d);
    TerminalValue xi = build_terminal(sc.terminal, d);
    AdmissibilityReport rep =
        certify_scenario(gen, xi, built.backend->grid(), built.backend->states(sc.steps),
                         sc.generator.zero_drift_integral_bound);

    Json j;
    j["task"] = "certify";
    j["generator"] = gen.name();
    j["terminal"] = xi.name();
    j["C"] = rep.C;
    j["horizon"] = rep.horizon;
    j["xi_bound"] = rep.xi_bound;
    j["zero_drift_bound"] = rep.zero_drift_bound;
    j["rho"] = rep.rho;
    j["beta"] = rep.beta;
    j["M"] = rep.M;
    j["R"] = rep.R;
    j["MR2"] = rep.MR2;
    Json checks;
    checks["smallness"] = check_json(rep.smallness);
    checks["beta_cap"] = check_json(rep.beta_cap);
    checks["contraction_cap"] = check_json(rep.contraction_cap);
    j["checks"] = checks;
    j["certified"] = rep.certified;
    return {rep.certified ? 0 : 1, j};
}

std::pair<int, Json> run_compare(const Scenario& sc, const std::string& out_dir,
                                 std::int64_t seed_override) {
    if (!sc.compare) throw ConfigurationError("compare task needs a 'compare' section");
    BuiltBackend built = build_backend(sc, seed_override);
    const int d = built.backend->noise_dim();
    Generator first_gen = build_generator(sc.generator, d);
    TerminalValue first_xi = build_terminal(sc.terminal, d);
    Generator second_gen = build_generator(sc.compare->second_generator, d);
    TerminalValue second_xi = build_terminal(sc.compare->second_terminal, d);

    ComparisonCheckParams params;
    params.radius = sc.compare->radius;
    params.samples = sc.compare->samples;
    params.seed = sc.compare->seed;
    params.tolerance = sc.compare->tolerance;
    ComparisonReport rep = compare_solutions(first_gen, first_xi, second_gen, second_xi,
                                             *built.backend, resolved_solver(sc), params);

    Json j;
    j["task"] = "compare";
    j["backend"] = sc.backend.kind;
    j["first_generator"] = first_gen.name();
    j["second_generator"] = second_gen.name();
    j["first_y0"] = rep.first_y0;
    j["second_y0"] = rep.second_y0;
    j["max_positive_gap"] = rep.max_positive_gap;
    j["tolerance"] = rep.tolerance;
    j["holds"] = rep.holds;
    Json hyp;
    hyp["a1"] = rep.hypotheses.a1;
    hyp["max_delta_y"] = rep.hypotheses.max_delta_y;
    hyp["max_delta_ybar"] = rep.hypotheses.max_delta_ybar;
    hyp["a2"] = rep.hypotheses.a2;
    hyp["delta_z_z2"] = rep.hypotheses.delta_z_z2;
    hyp["a3"] = rep.hypotheses.a3;
    hyp["first_monotone"] = rep.hypotheses.first_monotone;
    hyp["second_monotone"] = rep.hypotheses.second_monotone;
    j["hypotheses"] = hyp;
    write_profile_csv(out_dir, "comparison_profile.csv", "max_positive_gap",
                      built.backend->grid(), rep.profile);
    return {rep.holds ? 0 : 1, j};
}

std::pair<int, Json> run_bmo(const Scenario& sc, const std::string& out_dir,
                             std::int64_t seed_override) {
    SolveArtifacts art = run_picard(sc, seed_override);
    BmoEstimate est =
        estimate_bmo(art.outcome.solution.z, art.built.backend->grid(), *art.built.backend);

    Json j = solve_header(sc, art, "bmo");
    j["converged"] = art.outcome.report.converged;
    j["iterations"] = art.outcome.report.iterations;
    j["value"] = est.value;
    j["value_squared"] = est.value * est.value;
    j["lower_estimate"] = est.lower_estimate;
    j["profile"] = list_json(est.profile);
    write_profile_csv(out_dir, "bmo_profile.csv", "conditional_qv", art.built.backend->grid(),
                      est.profile);
    return {art.outcome.report.converged ? 0 : 1, j};
}

std::pair<int, Json> run_lemma(const Scenario& sc, std::int64_t seed_override) {
    if (!sc.lemma) throw ConfigurationError("lemma-check task needs a 'lemma' section");
    SolveArtifacts art = run_picard(sc, seed_override);
    LemmaBoundReport rep = check_lemma_bound(art.outcome.solution, art.gen, sc.lemma->m_bound,
                                             *art.built.backend);

    Json j = solve_header(sc, art, "lemma-check");
    j["converged"] = art.outcome.report.converged;
    j["m_bound"] = rep.m_bound;
    j["sampled_sup_y"] = rep.sampled_sup_y;
    j["lambda_m"] = rep.lambda_m;
    j["lambda_bar_m"] = rep.lambda_bar_m;
    j["k_z2"] = rep.k_z2;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["rhs_squared_norm_variant"] = rep.rhs_squared_norm_variant;
    j["pass"] = rep.pass;
    return {rep.pass ? 0 : 1, j};
}

std::pair<int, Json> run_oracle_diff(const Scenario& sc, std::int64_t seed_override) {
    if (!sc.oracle) throw ConfigurationError("oracle-diff task needs an 'oracle' section");
    SolveArtifacts art = run_picard(sc, seed_override);
    DiscreteSolution oracle = oracle_solution(sc.oracle->kind, art.xi, *art.built.backend,
                                              sc.oracle->param);

    const DiscreteSolution& sol = art.outcome.solution;
    double max_mean_gap = 0.0;
    double max_state_gap = 0.0;
    for (int k = 0; k <= sc.steps; ++k) {
        max_mean_gap = std::max(
            max_mean_gap, (sol.mean_y[k] - oracle.mean_y[k]).cwiseAbs().maxCoeff());
        max_state_gap =
            std::max(max_state_gap, (sol.y[k] - oracle.y[k]).cwiseAbs().maxCoeff());
    }

    Json j = solve_header(sc, art, "oracle-diff");
    j["oracle"] = sc.oracle->kind;
    j["converged"] = art.outcome.report.converged;
    j["y0_solver"] = vec_json(sol.mean_y[0]);
    j["y0_oracle"] = vec_json(oracle.mean_y[0]);
    j["y0_abs_diff"] = (sol.mean_y[0] - oracle.mean_y[0]).cwiseAbs().maxCoeff();
    j["max_mean_gap"] = max_mean_gap;
    j["max_state_gap"] = max_state_gap;
    return {art.outcome.report.converged ? 0 : 1, j};
}

std::pair<int, Json> run_particles(const Scenario& sc, const std::string& out_dir,
                                   std::int64_t seed_override) {
    if (!sc.particles) throw ConfigurationError("particles task needs a 'particles' section");
    const ParticleSpec& ps = *sc.particles;

    ParticleConfig cfg;
    cfg.particles = ps.count;
    cfg.noise_dim = sc.backend.noise_dim;
    cfg.grid = build_grid(sc.horizon, sc.steps);
    cfg.backend = ps.backend;
    cfg.branching = ps.branching;
    cfg.paths = ps.paths;
    cfg.degree = ps.degree;
    cfg.ridge = ps.ridge;
    cfg.seed = seed_override >= 0 ? static_cast<std::uint64_t>(seed_override) : sc.backend.seed;
    cfg.replications = ps.replications;
    cfg.solver = ps.solver;

    Generator gen = build_generator(sc.generator, cfg.noise_dim);
    TerminalValue xi = build_terminal(sc.terminal, cfg.noise_dim);

    if (ps.ladder.empty()) {
        ParticleSolution sol = solve_particles(gen, xi, cfg);
        Json j;
        j["task"] = "particles";
        j["particles"] = cfg.particles;
        j["backend"] = cfg.backend;
        j["generator"] = gen.name();
        j["terminal"] = xi.name();
        Json y0 = Json::array();
        double avg = 0.0;
        for (double v : sol.y0) {
            y0.push_back(v);
            avg += v;
        }
        j["y0"] = y0;
        j["y0_average"] = avg / static_cast<double>(sol.y0.size());
        j["converged"] = sol.converged;
        j["iterations"] = sol.iterations;
        j["deltas"] = list_json(sol.deltas);
        return {sol.converged ? 0 : 1, j};
    }

    SolveArtifacts reference = run_picard(sc, seed_override);
    const double mean_field_y0 = reference.outcome.solution.mean_y[0][0];
    ConvergenceStudy study = convergence_study(gen, xi, cfg, ps.ladder, mean_field_y0);

    Json j;
    j["task"] = "particles";
    j["backend"] = cfg.backend;
    j["generator"] = gen.name();
    j["terminal"] = xi.name();
    j["mean_field_y0"] = study.mean_field_y0;
    j["ladder"] = Json(study.ladder);
    j["rmse"] = list_json(study.rmse);
    j["stderr"] = list_json(study.stderr_mean);
    j["replications"] = cfg.replications;
    j["trend"] = study.trend;
    if (!out_dir.empty()) {
        std::ofstream out = open_csv(out_dir, "particles_rmse.csv");
        out << "particles,rmse,stderr\n";
        for (std::size_t i = 0; i < study.ladder.size(); ++i) {
            out << study.ladder[i] << ',' << study.rmse[i] << ',' << study.stderr_mean[i]
                << '\n';
        }
    }
    return {study.trend == "not-decreasing" ? 1 : 0, j};
}

Scenario parse_scenario(const Json& root) {
    expect_object(root, "scenario");
    check_keys(root, "",
               {"task", "grid", "generator", "terminal", "backend", "solver", "compare", "lemma",
                "oracle", "particles"});
    Scenario sc;
    if (root.contains("task")) sc.task = get_string(root, "", "task");

    if (!root.contains("grid")) throw SchemaError("missing required key 'grid'");
    const Json& grid = root.at("grid");
    expect_object(grid, "grid");
    check_keys(grid, "grid", {"horizon", "steps"});
    sc.horizon = get_double(grid, "grid", "horizon");
    sc.steps = get_int(grid, "grid", "steps");

    if (!root.contains("generator")) throw SchemaError("missing required key 'generator'");
    sc.generator = parse_generator(root.at("generator"), "generator");

    if (!root.contains("terminal")) throw SchemaError("missing required key 'terminal'");
    sc.terminal = parse_terminal(root.at("terminal"), "terminal");

    if (root.contains("backend")) sc.backend = parse_backend(root.at("backend"), "backend");

    if (root.contains("solver")) sc.solver = parse_solver(root.at("solver"), "solver", sc.solver);

    if (root.contains("compare")) sc.compare = parse_compare(root.at("compare"), "compare");

    if (root.contains("lemma")) {
        const Json& lemma = root.at("lemma");
        expect_object(lemma, "lemma");
        check_keys(lemma, "lemma", {"m_bound"});
        LemmaSpec spec;
        spec.m_bound = get_double(lemma, "lemma", "m_bound");
        sc.lemma = spec;
    }

    if (root.contains("oracle")) {
        const Json& oracle = root.at("oracle");
        expect_object(oracle, "oracle");
        check_keys(oracle, "oracle", {"kind", "param"});
        OracleSpec spec;
        spec.kind = get_string(oracle, "oracle", "kind");
        spec.param = get_double_or(oracle, "oracle", "param", 0.0);
        sc.oracle = spec;
    }

    if (root.contains("particles")) {
        sc.particles = parse_particles(root.at("particles"), "particles");
    }
    return sc;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t stop = std::min(e.byte, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw SchemaError("scenario is not valid JSON at line " + std::to_string(line) +
                          ", column " + std::to_string(column) + ": " + e.what());
    }
    return parse_scenario(root);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

RunResult run_task(const std::string& task, const Scenario& scenario,
                   const std::string& out_dir, std::int64_t seed_override) {
    if (scenario.task && *scenario.task != task) {
        throw ConfigurationError("scenario declares task '" + *scenario.task + "' but '" +
                                 task + "' was requested");
    }
    std::pair<int, Json> result;
    if (task == "solve") {
        result = run_solve(scenario, out_dir, seed_override);
    } else if (task == "certify") {
        result = run_certify(scenario, seed_override);
    } else if (task == "compare") {
        result = run_compare(scenario, out_dir, seed_override);
    } else if (task == "bmo") {
        result = run_bmo(scenario, out_dir, seed_override);
    } else if (task == "lemma-check") {
        result = run_lemma(scenario, seed_override);
    } else if (task == "oracle-diff") {
        result = run_oracle_diff(scenario, seed_override);
    } else if (task == "particles") {
        result = run_particles(scenario, out_dir, seed_override);
    } else {
        throw InvalidArgument("unknown task '" + task + "'");
    }
    return RunResult{result.first, result.second.dump(2) + "\n"};
}

}  // namespace mfbsde

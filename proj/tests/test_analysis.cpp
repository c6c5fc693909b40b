#include <cmath>
#include <string>

#include "doctest.h"
#include "mfbsde/analysis.hpp"
#include "mfbsde/delta.hpp"
#include "mfbsde/errors.hpp"
#include "mfbsde/generator.hpp"
#include "mfbsde/lattice.hpp"
#include "mfbsde/picard.hpp"
#include "mfbsde/terminal.hpp"

using namespace mfbsde;

namespace {

PicardParams tight() {
    PicardParams p;
    p.tol = 1e-24;
    p.max_iter = 80;
    return p;
}

}  // namespace

TEST_CASE("oracle: zero generator reproduces the solver bit for bit") {
    auto backend = make_lattice_backend(build_grid(1.0, 32), 2);
    auto gen = make_catalog_generator("zero", {}, 1.0, 1);
    auto xi = make_catalog_terminal("digital", {{"threshold", 0.2}, {"scale", 0.01}}, 1);

    auto outcome = picard_solve(xi, gen, *backend, tight());
    auto oracle = oracle_solution("zero", xi, *backend);

    for (int k = 0; k <= 32; ++k) {
        CHECK((outcome.solution.y[k] - oracle.y[k]).cwiseAbs().maxCoeff() <= 1e-14);
        if (k < 32) {
            CHECK((outcome.solution.z[k] - oracle.z[k]).cwiseAbs().maxCoeff() <= 1e-13);
        }
    }
}

TEST_CASE("oracle: mean-field linear closed form") {
    const double a = 0.5;
    auto backend = make_lattice_backend(build_grid(1.0, 16), 2);
    auto xi = make_catalog_terminal("constant", {{"value", 0.01}}, 1);

    auto oracle = oracle_solution("mean-field-linear", xi, *backend, a);
    CHECK(oracle.y[0](0, 0) == doctest::Approx(0.01 * std::exp(0.5)).epsilon(1e-13));
    // Constant terminal: E_k[xi] = xi and the drift adds the deterministic
    // exponential ramp, so Z vanishes.
    for (int k = 0; k < 16; ++k) {
        CHECK(oracle.z[k].cwiseAbs().maxCoeff() <= 1e-14);
        double t = backend->grid().nodes[k];
        double expected = 0.01 * std::exp(a * (1.0 - t));
        CHECK(oracle.y[k](0, 0) == doctest::Approx(expected).epsilon(1e-13));
    }

    // A digital terminal keeps the martingale part: Y_k - E_k[xi] is the
    // deterministic ramp of the mean.
    auto digital = make_catalog_terminal("digital", {{"threshold", 0.0}, {"scale", 0.01}}, 1);
    auto oracle2 = oracle_solution("mean-field-linear", digital, *backend, a);
    RowMat mart = backend->cond_expect(digital.evaluate(backend->states(16)), 16, 3);
    double mean = backend->expect(digital.evaluate(backend->states(16)), 16)[0];
    double ramp = (std::exp(a * (1.0 - backend->grid().nodes[3])) - 1.0) * mean;
    for (int s = 0; s < mart.rows(); ++s) {
        CHECK(oracle2.y[3](s, 0) == doctest::Approx(mart(s, 0) + ramp).epsilon(1e-13));
    }
}

TEST_CASE("oracle: Cole-Hopf closed form on the lattice") {
    const double c = 1.0;
    const TimeGrid grid = build_grid(1.0, 8);
    auto backend = make_lattice_backend(grid, 2);
    auto xi = make_catalog_terminal("digital", {{"threshold", 0.0}, {"scale", 0.01}}, 1);

    auto oracle = oracle_solution("cole-hopf", xi, *backend, c);

    // Direct transform computed with the raw lattice weights.
    Lattice lat = build_lattice(grid, 2);
    RowMat values = xi.evaluate(lat.states(8));
    RowMat transformed = (2.0 * c * values.array()).exp().matrix();
    double root = backend->cond_expect(transformed, 8, 0)(0, 0);
    CHECK(oracle.y[0](0, 0) == doctest::Approx(std::log(root) / (2.0 * c)).epsilon(1e-14));

    // The transform is monotone, so the oracle stays within the payoff range.
    CHECK(oracle.y[0](0, 0) > 0.0);
    CHECK(oracle.y[0](0, 0) < 0.01);

    CHECK_THROWS_AS(oracle_solution("cole-hopf", xi, *backend, 0.0), InvalidArgument);
    CHECK_THROWS_AS(oracle_solution("unknown", xi, *backend), InvalidArgument);
}

TEST_CASE("oracle: Cole-Hopf refuses sampled backends") {
    const TimeGrid grid = build_grid(1.0, 4);
    PathEnsemble paths = simulate_paths(grid, 256, 1, 9);
    RegressionBackend backend(paths, 2, 1e-10);
    auto xi = make_catalog_terminal("digital", {{"threshold", 0.0}, {"scale", 0.01}}, 1);
    CHECK_THROWS_AS(oracle_solution("cole-hopf", xi, backend, 1.0), UnsupportedConfiguration);
}

TEST_CASE("lemma bound holds on an enveloped scenario and rejects bad declarations") {
    auto backend = make_lattice_backend(build_grid(1.0, 32), 2);
    auto gen = make_catalog_generator(
        "affine", {{"const", 0.003}, {"y_coef", 0.05}, {"ybar_coef", 0.05}, {"z_coef", 0.05}},
        1.0, 1);
    auto xi = make_catalog_terminal("constant", {{"value", 0.004}}, 1);

    auto outcome = picard_solve(xi, gen, *backend, tight());
    REQUIRE(outcome.report.converged);

    auto rep = check_lemma_bound(outcome.solution, gen, 0.05, *backend);
    CHECK(rep.pass);
    CHECK(rep.lhs <= rep.rhs);
    CHECK(rep.m_bound == 0.05);
    CHECK(rep.sampled_sup_y <= 0.05);
    CHECK(rep.lambda_m ==
          doctest::Approx(0.003 + 0.05 * 0.05 / 4.0 + 0.05 * 0.05).epsilon(1e-13));
    CHECK(rep.lambda_bar_m == doctest::Approx(0.05 * 0.05).epsilon(1e-13));
    CHECK(rep.k_z2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.lhs == doctest::Approx(rep.bmo.value * rep.bmo.value).epsilon(1e-12));

    // rhs with ||k|| and with ||k||^2 coincide at T = 1 and differ otherwise.
    CHECK(rep.rhs == doctest::Approx(rep.rhs_squared_norm_variant).epsilon(1e-12));

    // Understating the sup bound of Y is a configuration error.
    CHECK_THROWS_AS(check_lemma_bound(outcome.solution, gen, 1e-5, *backend),
                    ConfigurationError);

    // No envelope, no lemma.
    auto paper = make_catalog_generator("paper-example", {}, 1.0, 1);
    CHECK_THROWS_AS(check_lemma_bound(outcome.solution, paper, 0.05, *backend),
                    UnsupportedConfiguration);
}

TEST_CASE("comparison of identical problems holds with zero gap") {
    auto backend = make_lattice_backend(build_grid(1.0, 16), 2);
    auto gen = make_catalog_generator("linear-mean-field", {{"a", 0.5}}, 1.0, 1);
    auto xi = make_catalog_terminal("constant", {{"value", 0.005}}, 1);

    ComparisonCheckParams params;
    params.seed = 4;
    auto rep = compare_solutions(gen, xi, gen, xi, *backend, tight(), params);
    CHECK(rep.holds);
    CHECK(rep.max_positive_gap == 0.0);
    CHECK(rep.first_y0 == rep.second_y0);
    CHECK(rep.tolerance == 1e-8);
    CHECK(rep.hypotheses.a1);
    CHECK(rep.hypotheses.a2);
    CHECK(rep.hypotheses.a3);
    REQUIRE(rep.profile.size() == 17);
    CHECK(rep.profile[0] == 0.0);
}

TEST_CASE("comparison respects an honest ordering") {
    auto backend = make_lattice_backend(build_grid(1.0, 32), 2);
    auto gen = make_catalog_generator("linear-mean-field", {{"a", 0.5}}, 1.0, 1);
    auto lo = make_catalog_terminal("constant", {{"value", 0.005}}, 1);
    auto hi = make_catalog_terminal("constant", {{"value", 0.008}}, 1);

    ComparisonCheckParams params;
    params.radius = 0.5;
    auto rep = compare_solutions(gen, lo, gen, hi, *backend, tight(), params);
    CHECK(rep.holds);
    CHECK(rep.max_positive_gap <= 1e-8);
    CHECK(rep.first_y0 < rep.second_y0);

    // Ordered drivers work too: a larger constant term dominates.
    auto f1 = make_catalog_generator("affine", {{"const", 0.001}}, 1.0, 1);
    auto f2 = make_catalog_generator("affine", {{"const", 0.002}}, 1.0, 1);
    auto rep2 = compare_solutions(f1, lo, f2, lo, *backend, tight(), params);
    CHECK(rep2.holds);
    CHECK(rep2.first_y0 < rep2.second_y0);
}

TEST_CASE("comparison hypothesis violations raise HypothesisError with a witness") {
    auto backend = make_lattice_backend(build_grid(1.0, 16), 2);
    auto gen = make_catalog_generator("linear-mean-field", {{"a", 0.5}}, 1.0, 1);
    auto lo = make_catalog_terminal("constant", {{"value", 0.005}}, 1);
    auto hi = make_catalog_terminal("constant", {{"value", 0.006}}, 1);

    ComparisonCheckParams params;

    // Terminal order reversed.
    try {
        compare_solutions(gen, hi, gen, lo, *backend, tight(), params);
        FAIL("expected HypothesisError");
    } catch (const HypothesisError& e) {
        CHECK(std::string(e.what()).find("xi") != std::string::npos);
    }

    // Driver order reversed.
    auto f_hi = make_catalog_generator("affine", {{"const", 0.002}}, 1.0, 1);
    auto f_lo = make_catalog_generator("affine", {{"const", 0.001}}, 1.0, 1);
    CHECK_THROWS_AS(compare_solutions(f_hi, lo, f_lo, lo, *backend, tight(), params),
                    HypothesisError);

    // Both drivers strictly decreasing in ybar: A3 fails.
    auto down = make_catalog_generator("linear-mean-field", {{"a", -0.5}}, 1.0, 1);
    try {
        compare_solutions(down, lo, down, hi, *backend, tight(), params);
        FAIL("expected HypothesisError");
    } catch (const HypothesisError& e) {
        CHECK(std::string(e.what()).find("ybar") != std::string::npos);
    }
}

TEST_CASE("delta coefficients recover affine slopes exactly") {
    auto backend = make_lattice_backend(build_grid(1.0, 8), 2);
    auto gen = make_catalog_generator(
        "affine", {{"const", 0.0}, {"y_coef", 0.3}, {"ybar_coef", 0.2}, {"z_coef", 0.4}}, 1.0, 1);

    auto xi1 = make_catalog_terminal("digital", {{"threshold", 0.0}, {"scale", 0.01}}, 1);
    auto xi2 = make_catalog_terminal("constant", {{"value", 0.002}}, 1);
    auto sol1 = picard_solve(xi1, gen, *backend, tight()).solution;
    auto sol2 = picard_solve(xi2, gen, *backend, tight()).solution;

    auto d = delta_coefficients(gen, sol1, sol2);
    for (int k = 0; k < 8; ++k) {
        for (int s = 0; s < d.delta_y[k].size(); ++s) {
            if (!d.flagged_y[k][s]) {
                CHECK(d.delta_y[k][s] == doctest::Approx(0.3).epsilon(1e-9));
            }
            if (!d.flagged_z[k][s]) {
                CHECK(d.delta_z[k](s, 0) == doctest::Approx(0.4).epsilon(1e-9));
            }
        }
        if (!d.flagged_ybar[k]) {
            CHECK(d.delta_ybar[k][0] == doctest::Approx(0.2).epsilon(1e-9));
        }
    }
}

TEST_CASE("delta coefficients flag vanishing denominators and keep the identity") {
    auto backend = make_lattice_backend(build_grid(1.0, 8), 2);
    auto gen = make_catalog_generator("clipped-quadratic", {{"radius", 1.0}}, 1.0, 1);
    auto xi = make_catalog_terminal("digital", {{"threshold", 0.0}, {"scale", 0.01}}, 1);

    auto sol = picard_solve(xi, gen, *backend, tight()).solution;

    // Identical solutions: every denominator vanishes, every entry is flagged
    // and zeroed.
    auto same = delta_coefficients(gen, sol, sol);
    for (int k = 0; k < 8; ++k) {
        CHECK(same.flagged_y[k].all());
        CHECK(same.flagged_ybar[k]);
        CHECK(same.flagged_z[k].all());
        CHECK(same.delta_y[k].cwiseAbs().maxCoeff() == 0.0);
        CHECK(same.delta_z[k].cwiseAbs().maxCoeff() == 0.0);
    }

    // Distinct solutions: the three quotients telescope back to the exact
    // generator difference.
    auto xi2 = make_catalog_terminal("tanh", {{"scale", 0.008}, {"slope", 1.0}}, 1);
    auto sol2 = picard_solve(xi2, gen, *backend, tight()).solution;
    auto d = delta_coefficients(gen, sol, sol2);
    for (int k = 0; k < 8; ++k) {
        for (int s = 0; s < d.delta_y[k].size(); ++s) {
            double y1 = sol.y[k](s, 0), y2 = sol2.y[k](s, 0);
            double z1 = sol.z[k](s, 0), z2 = sol2.z[k](s, 0);
            double e1 = sol.mean_y[k][0], e2 = sol2.mean_y[k][0];
            double t = backend->grid().nodes[k];
            auto f = [&](double y, double e, double z) {
                Eigen::VectorXd vy(1), ve(1), vz(1), vzb(1);
                vy << y;
                ve << e;
                vz << z;
                vzb << 0.0;
                return gen.evaluate(t, vy, ve, vz, vzb)[0];
            };
            double lhs = f(y1, e1, z1) - f(y2, e2, z2);
            double rhs = d.delta_y[k][s] * (y1 - y2) + d.delta_ybar[k][0] * (e1 - e2) +
                         d.delta_z[k](s, 0) * (z1 - z2);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }

    // Quadratic z driver: the quotient is the sum of the two slopes.
    auto quad = make_catalog_generator("quadratic-z", {{"c", 1.0}}, 1.0, 1);
    auto qs1 = picard_solve(xi, quad, *backend, tight()).solution;
    auto qs2 = picard_solve(xi2, quad, *backend, tight()).solution;
    auto dq = delta_coefficients(quad, qs1, qs2);
    for (int s = 0; s < dq.delta_z[3].rows(); ++s) {
        if (!dq.flagged_z[3][s]) {
            double expect = qs1.z[3](s, 0) + qs2.z[3](s, 0);
            CHECK(dq.delta_z[3](s, 0) == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

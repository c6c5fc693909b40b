#include <cmath>

#include "doctest.h"
#include "mfbsde/admissibility.hpp"
#include "mfbsde/errors.hpp"
#include "mfbsde/generator.hpp"
#include "mfbsde/lattice.hpp"
#include "mfbsde/terminal.hpp"

using namespace mfbsde;

TEST_CASE("regime constants at C = 1, T = 1") {
    auto rep = compute_constants(1.0, 1.0, 0.005, 0.0);
    CHECK(rep.rho * rep.rho == doctest::Approx(1.0 / 8194.0).epsilon(1e-12));
    CHECK(rep.beta == doctest::Approx(16.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rep.M == doctest::Approx(1024.0).epsilon(1e-12));
    CHECK(rep.R == doctest::Approx(2.0 * std::sqrt(2.0) * 0.005).epsilon(1e-12));
    CHECK(rep.MR2 == doctest::Approx(0.2048).epsilon(1e-12));

    CHECK(rep.smallness.pass);
    CHECK(rep.beta_cap.pass);
    CHECK(rep.contraction_cap.pass);
    CHECK(rep.certified);

    // The report's own arithmetic is internally consistent.
    CHECK(rep.MR2 == doctest::Approx(rep.M * rep.R * rep.R).epsilon(1e-12));
    CHECK(rep.smallness.lhs == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(rep.smallness.rhs == rep.rho);
}

TEST_CASE("constants scale as declared in C and T") {
    auto base = compute_constants(1.0, 1.0, 0.001, 0.0);
    auto c2 = compute_constants(2.0, 1.0, 0.001, 0.0);
    CHECK(c2.beta == doctest::Approx(2.0 * base.beta).epsilon(1e-14));
    CHECK(c2.M == doctest::Approx(4.0 * base.M).epsilon(1e-14));
    CHECK(c2.rho == doctest::Approx(0.5 * base.rho).epsilon(1e-14));

    // T^2 + 1 goes from 2 to 10, a factor of five.
    auto t3 = compute_constants(1.0, 3.0, 0.001, 0.0);
    CHECK(t3.M == doctest::Approx(5.0 * base.M).epsilon(1e-14));
    CHECK(t3.beta == doctest::Approx(std::sqrt(5.0) * base.beta).epsilon(1e-14));
    CHECK(t3.rho == doctest::Approx(base.rho / std::sqrt(5.0)).epsilon(1e-14));

    // R tracks the terminal bound only.
    auto big = compute_constants(1.0, 1.0, 0.002, 0.0);
    CHECK(big.R == doctest::Approx(2.0 * base.R).epsilon(1e-14));
}

TEST_CASE("certification flips as the data leaves the small regime") {
    // rho ~ 0.01105 at C = T = 1: 0.005 is inside, 0.012 is not.
    CHECK(compute_constants(1.0, 1.0, 0.005, 0.0).certified);

    auto out = compute_constants(1.0, 1.0, 0.012, 0.0);
    CHECK(!out.smallness.pass);
    CHECK(!out.certified);

    // The drift bound counts against the same budget.
    auto drift = compute_constants(1.0, 1.0, 0.009, 0.004);
    CHECK(!drift.smallness.pass);
    CHECK(compute_constants(1.0, 1.0, 0.009, 0.002).certified);
}

TEST_CASE("contraction cap implies the beta cap across the boundary") {
    // Both caps compare MR2 = 8 M xi^2 to one, so the implication must be
    // exact in floating point, including at the knife edge.
    for (int i = -400; i <= 400; ++i) {
        const double xi = 0.0110485 * (1.0 + i * 1e-7);
        auto rep = compute_constants(1.0, 1.0, xi, 0.0);
        if (rep.contraction_cap.pass) CHECK(rep.beta_cap.pass);
        CHECK(rep.beta_cap.pass == (rep.MR2 <= 1.0));
        CHECK(rep.contraction_cap.pass == (rep.MR2 < 1.0));
    }
    // xi = 1/(4 beta) sits exactly on the non-strict boundary in exact
    // arithmetic; in floats both verdicts still agree with the MR2 compare.
    const double edge = 1.0 / (4.0 * 16.0 * std::sqrt(2.0));
    auto rep = compute_constants(1.0, 1.0, edge, 0.0);
    CHECK(rep.beta_cap.pass == (rep.MR2 <= 1.0));
    CHECK(rep.contraction_cap.pass == (rep.MR2 < 1.0));
}

TEST_CASE("compute_constants validates its inputs") {
    CHECK_THROWS_AS(compute_constants(0.0, 1.0, 0.005, 0.0), InvalidArgument);
    CHECK_THROWS_AS(compute_constants(-1.0, 1.0, 0.005, 0.0), InvalidArgument);
    CHECK_THROWS_AS(compute_constants(1.0, 0.0, 0.005, 0.0), InvalidArgument);
    CHECK_THROWS_AS(compute_constants(1.0, 1.0, -0.005, 0.0), InvalidArgument);
    CHECK_THROWS_AS(compute_constants(1.0, 1.0, 0.005, -0.1), InvalidArgument);
    CHECK_THROWS_AS(compute_constants(1.0, std::nan(""), 0.005, 0.0), InvalidArgument);
}

TEST_CASE("certify_scenario reconciles declarations with samples") {
    const TimeGrid grid = build_grid(1.0, 16);
    Lattice lat = build_lattice(grid, 2);
    RowMat terminal = lat.states(grid.steps);

    auto gen = make_catalog_generator("affine", {{"const", 0.003}}, 1.0, 1);
    auto xi = make_catalog_terminal("tanh", {{"scale", 0.005}, {"slope", 1.0}}, 1);

    // Declared bounds that dominate the samples certify cleanly.
    auto rep = certify_scenario(gen, xi, grid, terminal, 0.003);
    CHECK(rep.certified);
    CHECK(rep.xi_bound == 0.005);
    CHECK(rep.zero_drift_bound == 0.003);

    // Negative declaration delegates to the grid quadrature of |f(t,0,...)|.
    auto quad = certify_scenario(gen, xi, grid, terminal, -1.0);
    CHECK(quad.zero_drift_bound == doctest::Approx(0.003).epsilon(1e-13));

    // An understated terminal bound is a configuration error, not a verdict.
    auto lying = xi.with_sup_bound(0.004);
    CHECK_THROWS_AS(certify_scenario(gen, lying, grid, terminal), ConfigurationError);

    // Same for an understated drift declaration.
    CHECK_THROWS_AS(certify_scenario(gen, xi, grid, terminal, 0.001), ConfigurationError);
}

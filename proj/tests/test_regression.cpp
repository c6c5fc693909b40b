#include <cmath>
#include <utility>

#include "doctest.h"
#include "mfbsde/condexp.hpp"
#include "mfbsde/errors.hpp"
#include "mfbsde/path_ensemble.hpp"

using namespace mfbsde;

TEST_CASE("monomial design enumerates graded monomials, constant first") {
    RowMat state(3, 2);
    state << 2.0, 3.0, -1.0, 0.5, 0.0, 4.0;

    RowMat d1 = monomial_design(state.col(0), 2);
    REQUIRE(d1.cols() == 3);
    for (int r = 0; r < 3; ++r) {
        CHECK(d1(r, 0) == 1.0);
        CHECK(d1(r, 1) == state(r, 0));
        CHECK(d1(r, 2) == state(r, 0) * state(r, 0));
    }

    // Two variables, degree 2: C(2+2,2) = 6 monomials, one per exponent pair.
    RowMat d2 = monomial_design(state, 2);
    REQUIRE(d2.cols() == 6);
    CHECK(d2.col(0) == Eigen::VectorXd::Ones(3));
    // Every expected product appears exactly once among the columns.
    auto has_column = [&](const Eigen::VectorXd& want) {
        for (int c = 0; c < d2.cols(); ++c) {
            if ((d2.col(c) - want).cwiseAbs().maxCoeff() == 0.0) return true;
        }
        return false;
    };
    Eigen::VectorXd x = state.col(0), y = state.col(1);
    CHECK(has_column(x));
    CHECK(has_column(y));
    CHECK(has_column(x.cwiseProduct(y)));
    CHECK(has_column(x.cwiseProduct(x)));
    CHECK(has_column(y.cwiseProduct(y)));

    CHECK_THROWS_AS(monomial_design(state, -1), InvalidArgument);
}

TEST_CASE("projector reproduces targets already in the span") {
    const TimeGrid g = build_grid(1.0, 4);
    PathEnsemble paths = simulate_paths(g, 4000, 1, 99);
    RowMat design = monomial_design(paths.cumulative[2], 3);

    LeastSquaresProjector proj(design, 0.0, "test");
    Eigen::VectorXd w = paths.cumulative[2].col(0);
    RowMat targets(4000, 1);
    targets.col(0) = 2.0 + 3.0 * w.array() + 0.5 * w.array().square();
    RowMat fit = proj.fitted(targets);
    CHECK((fit - targets).cwiseAbs().maxCoeff() <= 1e-9);

    // Projection is idempotent: fitting the fit changes nothing material.
    RowMat refit = proj.fitted(fit);
    CHECK((refit - fit).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("projector drops zero and duplicated columns") {
    RowMat design(5, 4);
    Eigen::VectorXd x(5);
    x << -2.0, -1.0, 0.0, 1.0, 2.0;
    design.col(0) = Eigen::VectorXd::Ones(5);
    design.col(1) = x;
    design.col(2) = Eigen::VectorXd::Zero(5);
    design.col(3) = x;  // exact duplicate of column 1

    LeastSquaresProjector proj(design, 0.0, "test");
    RowMat targets(5, 1);
    targets.col(0) = 1.5 * x.array() - 0.25;
    CHECK((proj.fitted(targets) - targets).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("near-collinear columns raise IllConditionedRegression") {
    RowMat design(6, 3);
    Eigen::VectorXd x(6);
    x << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
    design.col(0) = Eigen::VectorXd::Ones(6);
    design.col(1) = x;
    design.col(2) = x * (1.0 + 1e-15);  // not bitwise equal, hopelessly collinear

    try {
        LeastSquaresProjector proj(design, 0.0, "unit");
        FAIL("expected IllConditionedRegression");
    } catch (const IllConditionedRegression& e) {
        CHECK(e.condition_number() > 1e12);
        CHECK(std::string(e.what()).find("unit") != std::string::npos);
    }
}

TEST_CASE("regression backend recovers conditional moments of W") {
    const TimeGrid g = build_grid(1.0, 8);
    PathEnsemble paths = simulate_paths(g, 100000, 1, 2024);
    RegressionBackend backend(paths, 3, 0.0);

    CHECK(!backend.exact());
    CHECK(backend.state_count(3) == 100000);

    // E_k[W_T^2] = W_k^2 + (T - t_k); the truth lies in the degree-3 span so
    // only Monte Carlo noise remains.
    const int N = g.steps;
    RowMat target = paths.terminal().array().square().matrix();
    for (int k : {2, 5}) {
        RowMat fit = backend.cond_expect(target, N, k);
        Eigen::VectorXd w = paths.cumulative[k].col(0);
        Eigen::VectorXd truth = w.array().square() + (g.horizon - g.nodes[k]);
        double rms = std::sqrt((fit.col(0) - truth).squaredNorm() / fit.rows());
        CHECK(rms < 0.05);
    }

    // Conditioning a value on its own step returns it untouched.
    RowMat same = backend.cond_expect(target, N, N);
    CHECK(same == target);

    // expect() is the plain sample mean.
    Eigen::VectorXd mean = backend.expect(target, N);
    CHECK(mean[0] == doctest::Approx(target.col(0).mean()).epsilon(1e-15));
}

TEST_CASE("regression step zero collapses to the sample mean") {
    const TimeGrid g = build_grid(1.0, 4);
    PathEnsemble paths = simulate_paths(g, 5000, 1, 7);
    RegressionBackend backend(paths, 3, 0.0);

    RowMat x = paths.cumulative[1].array().cos().matrix();
    RowMat fit = backend.cond_expect(x, 1, 0);
    double mean = x.col(0).mean();
    for (int p = 0; p < fit.rows(); ++p) {
        CHECK(fit(p, 0) == doctest::Approx(mean).epsilon(1e-14));
    }
}

TEST_CASE("regression diffusion projection finds the integrand") {
    const TimeGrid g = build_grid(1.0, 4);
    PathEnsemble paths = simulate_paths(g, 200000, 1, 31);
    RegressionBackend backend(paths, 2, 0.0);

    // x = W_{k+1}: E_k[x dW]/dt = 1 up to regression noise.
    for (int k : {0, 2}) {
        RowMat z = backend.cond_expect_dw(paths.cumulative[k + 1], k);
        double rms = std::sqrt((z.col(0).array() - 1.0).square().sum() / z.rows());
        CHECK(rms < 0.05);
    }

    // The fused call shares one factorization with the separate ones.
    RowMat x = paths.cumulative[3].array().square().matrix();
    auto [cond, dw] = backend.cond_expect_with_dw(x, 2);
    RowMat cond_sep = backend.cond_expect(x, 3, 2);
    RowMat dw_sep = backend.cond_expect_dw(x, 2);
    CHECK((cond - cond_sep).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((dw - dw_sep).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("regression backend rejects bad configuration") {
    const TimeGrid g = build_grid(1.0, 2);
    PathEnsemble paths = simulate_paths(g, 100, 1, 1);
    CHECK_THROWS_AS(RegressionBackend(paths, -1, 0.0), InvalidArgument);
    CHECK_THROWS_AS(RegressionBackend(paths, 2, -1e-9), InvalidArgument);

    RegressionBackend backend(paths, 2, 1e-10);
    RowMat bad = RowMat::Zero(7, 1);
    CHECK_THROWS_AS(backend.cond_expect(bad, 2, 0), InvalidArgument);
    CHECK_THROWS_AS(backend.cond_expect(paths.terminal(), 1, 2), InvalidArgument);
}

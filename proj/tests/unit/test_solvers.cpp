#include "oracles.hpp"

#include "msgest/errors.hpp"
#include "msgest/solvers.hpp"

#include <doctest.h>

#include <random>

using namespace msgest;

namespace {

LassoConfig plain() {
    LassoConfig c;
    c.standardize = false;
    return c;
}

Dataset regression_instance(Index n, Index p, std::uint64_t seed, double noise = 1.0) {
    Matrix x = oracle::gaussian(n, p, seed);
    Vector beta = Vector::Zero(p);
    for (Index j = 0; j < std::min<Index>(p, 4); ++j) beta[j] = (j % 2 ? -1.5 : 2.0);
    Vector y = x * beta + noise * oracle::gaussian_vec(n, seed + 1000);
    y.array() += 0.7;
    return oracle::make(x, y);
}

Dataset logistic_instance(Index n, Index p, std::uint64_t seed, double scale = 1.0) {
    Matrix x = oracle::gaussian(n, p, seed);
    Vector beta = Vector::Zero(p);
    for (Index j = 0; j < std::min<Index>(p, 3); ++j) beta[j] = scale * (j % 2 ? -1.0 : 1.0);
    std::mt19937_64 rng(seed + 7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector y(n);
    Vector eta = x * beta;
    for (Index i = 0; i < n; ++i) y[i] = u(rng) < oracle::sigmoid(eta[i] + 0.3) ? 1.0 : 0.0;
    return oracle::make(x, y, Task::classification);
}

InclusionVector all_of(Index p) {
    InclusionVector g(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) g.set(static_cast<std::size_t>(j), true);
    return g;
}

} // namespace

TEST_CASE("lasso: lambda at or above lambda_max gives the empty model") {
    Dataset d = regression_instance(60, 8, 1);
    const double lmax = lasso_lambda_max(d, plain());
    // Oracle: lambda_max = max_j |(2/n) x_j'(y - ybar)|.
    Vector yc = d.y.array() - d.y.mean();
    Matrix xc = d.x.rowwise() - d.x.colwise().mean();
    const double expect = (2.0 / 60.0) * (xc.transpose() * yc).cwiseAbs().maxCoeff();
    CHECK(lmax == doctest::Approx(expect).epsilon(1e-12));
    FitResult f = lasso_cd(d, lmax, plain());
    CHECK(f.gamma.count() == 0);
    CHECK(f.beta.intercept == doctest::Approx(d.y.mean()).epsilon(1e-12));
    CHECK(lasso_cd(d, 2 * lmax, plain()).gamma.count() == 0);
    CHECK(lasso_cd(d, 0.99 * lmax, plain()).gamma.count() >= 1);
}

TEST_CASE("lasso: orthogonal design matches the soft-threshold closed form") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Index n = 64, p = 10;
        Matrix x = oracle::orthogonal_design(n, p, seed);
        Vector y = x * Vector::LinSpaced(p, -1.0, 1.0) + oracle::gaussian_vec(n, seed + 50);
        Dataset d = oracle::make(x, y);
        const double lambda = 0.05 * static_cast<double>(seed);
        LassoConfig cfg = plain();
        cfg.tol = 1e-12;
        FitResult f = lasso_cd(d, lambda, cfg);
        CHECK(f.converged);
        for (Index j = 0; j < p; ++j) {
            const double z = x.col(j).dot(y) / static_cast<double>(n);
            CHECK(std::abs(f.beta.values[j] - oracle::soft_threshold(z, lambda / 2.0)) <= 1e-8);
        }
        CHECK(std::abs(f.beta.intercept - y.mean()) <= 1e-10);
    }
}

TEST_CASE("lasso: KKT conditions hold on random instances") {
    std::mt19937_64 rng(123);
    for (int t = 0; t < 50; ++t) {
        Dataset d = regression_instance(50, 20, 100 + static_cast<std::uint64_t>(t));
        const double lmax = lasso_lambda_max(d, plain());
        const double lambda = std::uniform_real_distribution<double>(0.01, 0.99)(rng) * lmax;
        FitResult f = lasso_cd(d, lambda, plain());
        CHECK(f.converged);
        CHECK(oracle::lasso_kkt_residual(d.x, d.y, f.beta.values, f.beta.intercept, lambda, Vector::Ones(20)) <=
              1e-6);
    }
}

TEST_CASE("lasso: standardization acts as per-column penalty weights") {
    Dataset d = regression_instance(80, 12, 7);
    d.x.col(3) *= 25.0;
    d.x.col(5) *= 0.1;
    LassoConfig cfg;
    cfg.standardize = true;
    const double lambda = 0.2 * lasso_lambda_max(d, cfg);
    FitResult f = lasso_cd(d, lambda, cfg);
    CHECK(oracle::lasso_kkt_residual(d.x, d.y, f.beta.values, f.beta.intercept, lambda,
                                     oracle::population_sd(d.x)) <= 1e-6);
}

TEST_CASE("lasso: objective never increases across sweeps") {
    Dataset d = regression_instance(100, 30, 3);
    LassoConfig cfg = plain();
    cfg.record_trace = true;
    FitResult f = lasso_cd(d, 0.05, cfg);
    REQUIRE(f.objective_trace.size() >= 2);
    for (std::size_t k = 1; k < f.objective_trace.size(); ++k)
        CHECK(f.objective_trace[k] <= f.objective_trace[k - 1] + 1e-12);
    // The reported objective is the oracle objective at the solution.
    Vector r = d.y - d.x * f.beta.values;
    r.array() -= f.beta.intercept;
    const double obj = r.squaredNorm() / 100.0 + 0.05 * f.beta.values.cwiseAbs().sum();
    CHECK(f.objective == doctest::Approx(obj).epsilon(1e-10));
}

TEST_CASE("lasso: gamma matches the support of beta") {
    Dataset d = regression_instance(70, 15, 9);
    for (const auto& f : lasso_path(d)) CHECK(f.gamma == InclusionVector::support_of(f.beta.values));
}

TEST_CASE("lasso: non-convergence is reported, not thrown") {
    Dataset d = regression_instance(50, 20, 4);
    LassoConfig cfg = plain();
    cfg.max_iter = 1;
    cfg.tol = 1e-15;
    FitResult f = lasso_cd(d, 0.01, cfg);
    CHECK_FALSE(f.converged);
}

TEST_CASE("lasso: non-finite data and bad configs are rejected") {
    Dataset d = regression_instance(20, 3, 5);
    d.x(2, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lasso_cd(d, 0.1), DataError);
    Dataset ok = regression_instance(20, 3, 5);
    CHECK_THROWS_AS(lasso_cd(ok, -1.0), ConfigError);
    LassoConfig bad;
    bad.lambda_grid = {0.1, 0.2};
    CHECK_THROWS_AS(lasso_path(ok, bad), ConfigError);
    bad.lambda_grid = {};
    bad.tol = 0.0;
    CHECK_THROWS_AS(lasso_cd(ok, 0.1, bad), ConfigError);
}

TEST_CASE("lasso path: auto grid shape and warm starts match cold starts") {
    Dataset d = regression_instance(60, 15, 11);
    LassoConfig cfg = plain();
    auto path = lasso_path(d, cfg);
    REQUIRE(path.size() == 100);
    const double lmax = lasso_lambda_max(d, cfg);
    CHECK(path.front().lambda == doctest::Approx(lmax).epsilon(1e-12));
    CHECK(path.back().lambda == doctest::Approx(1e-3 * lmax).epsilon(1e-10));
    CHECK(path.front().gamma.count() == 0);
    for (std::size_t k = 1; k < path.size(); ++k) CHECK(path[k].lambda < path[k - 1].lambda);
    for (std::size_t k = 0; k < path.size(); k += 7) {
        FitResult cold = lasso_cd(d, path[k].lambda, cfg);
        CHECK((cold.beta.values - path[k].beta.values).cwiseAbs().maxCoeff() <= 1e-5);
    }
}

TEST_CASE("lasso path: custom grid is honored") {
    Dataset d = regression_instance(40, 5, 12);
    LassoConfig cfg = plain();
    cfg.lambda_grid = {1.0, 0.5, 0.1};
    auto path = lasso_path(d, cfg);
    REQUIRE(path.size() == 3);
    CHECK(path[1].lambda == 0.5);
}

TEST_CASE("log grid") {
    auto g = log_grid(10.0, 5, 1e-2);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == doctest::Approx(10.0));
    CHECK(g.back() == doctest::Approx(0.1));
    CHECK(g[2] == doctest::Approx(1.0));
}

TEST_CASE("GIC penalties") {
    CHECK(GicConfig{}.penalty == GicPenalty::bic);
    GicConfig ric{GicPenalty::ric, 0.0};
    CHECK(ric.lambda(500, 100) == doctest::Approx(12.2647).epsilon(1e-5));
    CHECK(ric.lambda(500, 100) == doctest::Approx(2.0 * (std::log(100.0) + std::log(std::log(100.0)))));
    GicConfig ebic{GicPenalty::ebic, 0.0};
    CHECK(ebic.lambda(500, 100) == doctest::Approx(2.0 * std::log(100.0) + std::log(500.0)));
    GicConfig bic{GicPenalty::bic, 0.0};
    CHECK(bic.lambda(500, 100) == doctest::Approx(std::log(500.0)));
    GicConfig custom{GicPenalty::custom, 0.0};
    CHECK_THROWS_AS(custom.validate(), ConfigError);
}

TEST_CASE("GIC score matches a least-squares oracle") {
    Dataset d = regression_instance(90, 8, 13);
    GicConfig cfg;
    const double lam = cfg.lambda(90, 8);
    for (std::uint32_t mask : {0u, 1u, 3u, 15u, 0x55u, 0xffu}) {
        auto cols = oracle::bits_to_indices(mask, 8);
        InclusionVector g = InclusionVector::from_indices(8, cols);
        CHECK(gic_score(d, g, cfg) == doctest::Approx(oracle::gic_oracle(d.x, d.y, cols, lam)).epsilon(1e-10));
    }
    // Empty model: n log(var_hat(y)).
    const double var = (d.y.array() - d.y.mean()).square().mean();
    CHECK(gic_score(d, InclusionVector(8), cfg) == doctest::Approx(90.0 * std::log(var)).epsilon(1e-12));
}

TEST_CASE("GIC score: a perfect fit scores minus infinity") {
    Matrix x = oracle::gaussian(30, 5, 14);
    Vector y = x.col(1) * 3.0 - x.col(4);
    Dataset d = oracle::make(x, y);
    InclusionVector s = InclusionVector::from_indices(5, std::vector<Index>{1, 4});
    CHECK(gic_score(d, s, GicConfig{}) == -std::numeric_limits<double>::infinity());
    CHECK(gic_select(d, {InclusionVector(5), s}, GicConfig{}) == s);
}

TEST_CASE("GIC score: rank deficiency is an error") {
    Matrix x = oracle::gaussian(30, 4, 15);
    x.col(2) = x.col(0);
    Dataset d = oracle::make(x, oracle::gaussian_vec(30, 16));
    InclusionVector g = InclusionVector::from_indices(4, std::vector<Index>{0, 2});
    CHECK_THROWS_AS(gic_score(d, g, GicConfig{}), NumericalError);
    CHECK_THROWS_AS(gic_select(d, {g}, GicConfig{}), NumericalError);
    // A rank-deficient candidate is skipped when others are usable.
    InclusionVector ok = InclusionVector::from_indices(4, std::vector<Index>{1});
    CHECK(gic_select(d, {g, ok}, GicConfig{}) == ok);
}

TEST_CASE("gic_select: exhaustive argmin with the tie rule, order invariant") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        Dataset d = regression_instance(60, 6, 200 + seed, 2.0);
        GicConfig cfg{GicPenalty::bic, 0.0};
        const double lam = cfg.lambda(60, 6);
        std::vector<InclusionVector> cands;
        double best = std::numeric_limits<double>::infinity();
        std::vector<Index> best_cols;
        for (std::uint32_t mask = 0; mask < 64; ++mask) {
            auto cols = oracle::bits_to_indices(mask, 6);
            cands.push_back(InclusionVector::from_indices(6, cols));
            const double s = oracle::gic_oracle(d.x, d.y, cols, lam);
            const bool better = s < best - 1e-9 ||
                                (std::abs(s - best) <= 1e-9 &&
                                 (cols.size() < best_cols.size() || (cols.size() == best_cols.size() && cols < best_cols)));
            if (better) {
                best = s;
                best_cols = cols;
            }
        }
        InclusionVector chosen = gic_select(d, cands, cfg);
        CHECK(chosen.indices() == best_cols);
        std::reverse(cands.begin(), cands.end());
        CHECK(gic_select(d, cands, cfg) == chosen);
        std::shuffle(cands.begin(), cands.end(), std::mt19937_64(seed));
        CHECK(gic_select(d, cands, cfg) == chosen);
    }
}

TEST_CASE("gic_select: strong signal picks the true support over the empty model") {
    Matrix x = oracle::gaussian(200, 10, 17);
    Vector y = 3.0 * x.col(2) - 2.0 * x.col(7) + 0.5 * oracle::gaussian_vec(200, 18);
    Dataset d = oracle::make(x, y);
    InclusionVector s = InclusionVector::from_indices(10, std::vector<Index>{2, 7});
    CHECK(gic_select(d, {InclusionVector(10), s}, GicConfig{}) == s);
    CHECK(gic_select(d, {s}, GicConfig{}) == s);
    GicConfig huge{GicPenalty::custom, 1e12};
    CHECK(gic_select(d, {s, InclusionVector(10)}, huge).count() == 0);
}

TEST_CASE("gic_select: exact ties go to the smaller then lexicographically first model") {
    // Two identical columns: {0} and {1} have identical scores.
    Matrix x = oracle::gaussian(40, 3, 19);
    x.col(1) = x.col(0);
    Vector y = x.col(0) + 0.1 * oracle::gaussian_vec(40, 20);
    Dataset d = oracle::make(x, y);
    InclusionVector a = InclusionVector::from_indices(3, std::vector<Index>{1});
    InclusionVector b = InclusionVector::from_indices(3, std::vector<Index>{0});
    CHECK(gic_select(d, {a, b}, GicConfig{}) == b);
    CHECK(gic_select(d, {b, a}, GicConfig{}) == b);
}

TEST_CASE("ols_fit examples") {
    Matrix x(2, 1);
    x << 1, 1;
    Vector y(2);
    y << 2, 4;
    CoefficientVector b = ols_fit(oracle::make(x, y), all_of(1), false);
    CHECK(b.values[0] == doctest::Approx(3.0).epsilon(1e-15));

    Matrix xn = oracle::gaussian(50, 6, 21);
    Vector beta(6);
    beta << 1.5, 0, -2, 0, 0.25, 0;
    Vector yn = xn * beta;
    yn.array() += 4.0;
    InclusionVector g = InclusionVector::from_indices(6, std::vector<Index>{0, 2, 3, 4});
    CoefficientVector fit = ols_fit(oracle::make(xn, yn), g);
    CHECK((fit.values - beta).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(fit.intercept - 4.0) <= 1e-10);

    Matrix xd = oracle::gaussian(30, 3, 22);
    xd.col(2) = xd.col(0);
    CHECK_THROWS_AS(ols_fit(oracle::make(xd, oracle::gaussian_vec(30, 1)), all_of(3)), NumericalError);
    CHECK_THROWS_AS(ols_fit(oracle::make(xd, oracle::gaussian_vec(30, 1)), InclusionVector(3)), ConfigError);
}

TEST_CASE("ols_fit residuals are orthogonal to the selected columns") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Dataset d = regression_instance(40, 7, 300 + seed);
        InclusionVector g = InclusionVector::from_indices(7, std::vector<Index>{0, 3, 5});
        CoefficientVector b = ols_fit(d, g);
        Vector r = d.y - d.x * b.values;
        r.array() -= b.intercept;
        for (Index j : g.indices()) CHECK(std::abs(d.x.col(j).dot(r)) / 40.0 <= 1e-8);
        CHECK(std::abs(r.sum()) / 40.0 <= 1e-8);
        auto ls = oracle::least_squares(d.x, d.y, {0, 3, 5});
        CHECK((b.values - ls.beta).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("logistic_irls: intercept-only MLEs") {
    Matrix x = oracle::gaussian(8, 1, 1);
    Vector balanced(8);
    balanced << 1, 0, 1, 0, 1, 0, 1, 0;
    auto f = logistic_irls(oracle::make(x, balanced, Task::classification), InclusionVector(1));
    CHECK(f.converged);
    CHECK(std::abs(f.beta.intercept) <= 1e-10);

    Vector three_to_one(8);
    three_to_one << 1, 1, 1, 0, 1, 1, 1, 0;
    auto g = logistic_irls(oracle::make(x, three_to_one, Task::classification), InclusionVector(1));
    CHECK(g.converged);
    CHECK(std::abs(g.beta.intercept - std::log(3.0)) <= 1e-8);
}

TEST_CASE("logistic_irls: score vanishes at the solution") {
    Dataset d = logistic_instance(300, 5, 31);
    auto f = logistic_irls(d, all_of(5));
    CHECK(f.converged);
    CHECK_FALSE(f.separated);
    Vector g = oracle::logistic_gradient(d.x, d.y, f.beta.values, f.beta.intercept);
    CHECK(g.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("logistic_irls: separable data is flagged") {
    Matrix x(6, 1);
    x << -3, -2, -1, 1, 2, 3;
    Vector y(6);
    y << 0, 0, 0, 1, 1, 1;
    auto f = logistic_irls(oracle::make(x, y, Task::classification), all_of(1));
    CHECK(f.separated);
    CHECK_FALSE(f.converged);
}

TEST_CASE("logistic lasso: lambda_max gives the intercept-only model") {
    Dataset d = logistic_instance(200, 10, 41);
    const double lmax = logistic_lambda_max(d, plain());
    Vector yc = d.y.array() - d.y.mean();
    Matrix xc = d.x.rowwise() - d.x.colwise().mean();
    CHECK(lmax == doctest::Approx((xc.transpose() * yc).cwiseAbs().maxCoeff() / 200.0).epsilon(1e-12));
    FitResult f = logistic_lasso(d, lmax, plain());
    CHECK(f.gamma.count() == 0);
    const double pbar = d.y.mean();
    CHECK(f.beta.intercept == doctest::Approx(std::log(pbar / (1 - pbar))).epsilon(1e-8));
    CHECK(logistic_lasso(d, 0.9 * lmax, plain()).gamma.count() >= 1);
}

TEST_CASE("logistic lasso: stationarity on random instances") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Dataset d = logistic_instance(200, 10, 500 + seed);
        for (bool standardize : {false, true}) {
            LassoConfig cfg;
            cfg.standardize = standardize;
            const double lambda = 0.2 * logistic_lambda_max(d, cfg);
            FitResult f = logistic_lasso(d, lambda, cfg);
            CHECK(f.converged);
            Vector w = standardize ? oracle::population_sd(d.x) : Vector::Ones(10);
            CHECK(oracle::logistic_lasso_residual(d.x, d.y, f.beta.values, f.beta.intercept, lambda, w) <= 1e-5);
        }
    }
}

TEST_CASE("logistic lasso: lambda 0 matches the unpenalized MLE") {
    Dataset d = logistic_instance(400, 6, 61);
    FitResult f = logistic_lasso(d, 0.0, plain());
    auto mle = logistic_irls(d, all_of(6));
    REQUIRE(mle.converged);
    CHECK((f.beta.values - mle.beta.values).cwiseAbs().maxCoeff() <= 1e-4);
    CHECK(std::abs(f.beta.intercept - mle.beta.intercept) <= 1e-4);
}

TEST_CASE("logistic lasso path: descending, warm-started, early stop allowed") {
    Dataset d = logistic_instance(300, 8, 71, 2.0);
    auto path = logistic_lasso_path(d);
    REQUIRE(!path.empty());
    CHECK(path.size() <= 100);
    CHECK(path.front().gamma.count() == 0);
    for (std::size_t k = 1; k < path.size(); ++k) CHECK(path[k].lambda < path[k - 1].lambda);
    CHECK_THROWS_AS(logistic_lasso(regression_instance(20, 3, 1), 0.1), ConfigError);
}

TEST_CASE("classification GIC uses deviance plus penalty") {
    Dataset d = logistic_instance(300, 5, 81, 2.0);
    GicConfig cfg{GicPenalty::bic, 0.0};
    InclusionVector g = InclusionVector::from_indices(5, std::vector<Index>{0, 1});
    auto fit = logistic_irls(d, g);
    // Oracle deviance: -2 log-likelihood at the MLE.
    Vector eta = d.x * fit.beta.values;
    eta.array() += fit.beta.intercept;
    double dev = 0.0;
    for (Index i = 0; i < 300; ++i) {
        const double p = oracle::sigmoid(eta[i]);
        dev -= 2.0 * (d.y[i] * std::log(p) + (1 - d.y[i]) * std::log(1 - p));
    }
    CHECK(gic_score(d, g, cfg) == doctest::Approx(dev + 2.0 * std::log(300.0)).epsilon(1e-9));
    CHECK(gic_select(d, {InclusionVector(5), g}, cfg) == g);
}

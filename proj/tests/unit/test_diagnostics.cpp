#include "oracles.hpp"

#include "msgest/diagnostics.hpp"
#include "msgest/errors.hpp"

#include <doctest.h>

using namespace msgest;

namespace {

Dataset design(const Matrix& x) { return oracle::make(x, Vector::Zero(x.rows())); }

} // namespace

TEST_CASE("check_a1: identity Gram gives (1, 1)") {
    Matrix x = oracle::orthogonal_design(40, 5, 1);
    std::vector<Index> s{0, 2, 4};
    A1Stats a = check_a1(design(x), s);
    CHECK(a.v1_hat == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.v2_hat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("check_a1: duplicated support column gives v2 = 0") {
    Matrix x = oracle::gaussian(50, 4, 2);
    x.col(3) = x.col(1);
    std::vector<Index> s{1, 3};
    CHECK(std::abs(check_a1(design(x), s).v2_hat) <= 1e-10);
    CHECK_THROWS_AS(check_a1(design(x), std::vector<Index>{}), ConfigError);
}

TEST_CASE("check_a1: v2 matches a closed-form 3x3 eigenvalue oracle") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Matrix x = oracle::gaussian(500, 10, seed);
        std::vector<Index> s{1, 4, 8};
        Matrix xs(500, 3);
        for (int k = 0; k < 3; ++k) xs.col(k) = x.col(s[static_cast<std::size_t>(k)]);
        const auto ev = oracle::symmetric_eigenvalues_3x3(xs.transpose() * xs / 500.0);
        A1Stats a = check_a1(design(x), s);
        CHECK(std::abs(a.v2_hat - ev[0]) <= 1e-8);
        CHECK(a.v1_hat == doctest::Approx((x.colwise().squaredNorm() / 500.0).maxCoeff()).epsilon(1e-14));
    }
}

TEST_CASE("check_a1: standardized Gaussian columns have v1 near 1") {
    SyntheticConfig cfg;
    cfg.n = 2000;
    cfg.p = 20;
    cfg.seed = 4;
    auto [std_d, rec] = standardize(generate_synthetic(cfg).first);
    CHECK(std::abs(check_a1(std_d, std::vector<Index>{0}).v1_hat - 1.0) <= 0.05);
}

TEST_CASE("check_a3: orthogonal design gives 0") {
    Matrix x = oracle::orthogonal_design(30, 6, 3);
    std::vector<Index> s{0, 3};
    std::vector<double> sg{1.0, -1.0};
    CHECK(check_a3(design(x), s, sg) <= 1e-12);
}

TEST_CASE("check_a3: single-support closed form equals |c|") {
    // Columns with unit norm^2 = n and cross-correlation c with column 0.
    for (double c : {-0.7, -0.2, 0.0, 0.4, 0.95}) {
        Matrix q = oracle::orthogonal_design(60, 3, 5);
        Matrix x(60, 3);
        x.col(0) = q.col(0);
        x.col(1) = c * q.col(0) + std::sqrt(1 - c * c) * q.col(1);
        x.col(2) = q.col(2);
        std::vector<Index> s{0};
        std::vector<double> sg{1.0};
        CHECK(check_a3(design(x), s, sg) == doctest::Approx(std::abs(c)).epsilon(1e-10));
        // y does not enter.
        Dataset scaled = oracle::make(x, oracle::gaussian_vec(60, 9) * 5.0);
        CHECK(check_a3(scaled, s, sg) == doctest::Approx(std::abs(c)).epsilon(1e-10));
    }
}

TEST_CASE("check_a3: singular support Gram is an error") {
    Matrix x = oracle::gaussian(20, 3, 6);
    x.col(1) = x.col(0);
    std::vector<Index> s{0, 1};
    std::vector<double> sg{1.0, 1.0};
    CHECK_THROWS_AS(check_a3(design(x), s, sg), NumericalError);
}

TEST_CASE("check_a4: simple cases") {
    Matrix q = oracle::orthogonal_design(40, 6, 7);
    CHECK(check_a4(design(q), 3) == doctest::Approx(1.0).epsilon(1e-12));
    Matrix x = oracle::gaussian(40, 5, 8);
    x.col(4) = x.col(2);
    CHECK(std::abs(check_a4(design(x), 2)) <= 1e-12);
    CHECK(check_a4(design(x), 1) == doctest::Approx((x.colwise().squaredNorm() / 40.0).minCoeff()).epsilon(1e-13));
    CHECK_THROWS_AS(check_a4(design(oracle::gaussian(10, 60, 1)), 5), ConfigError);  // C(60,5) > 1e6
    CHECK_THROWS_AS(check_a4(design(x), 0), ConfigError);
}

TEST_CASE("check_a4: equals a bitmask brute-force enumeration") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Matrix x = oracle::gaussian(30, 8, 100 + seed);
        for (int s : {1, 2, 3}) CHECK(check_a4(design(x), s) == oracle::sparse_riesz_bruteforce(x, s));
    }
}

TEST_CASE("check_a4: nonincreasing in s") {
    Matrix x = oracle::gaussian(25, 7, 9);
    double prev = check_a4(design(x), 1);
    for (Index s = 2; s <= 7; ++s) {
        double cur = check_a4(design(x), s);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
}

TEST_CASE("precondition_elliptical: output rows are orthogonal with norm^2 p") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Matrix x = oracle::gaussian(20, 60, seed);
        Dataset d = oracle::make(x, oracle::gaussian_vec(20, seed + 9));
        Dataset t = precondition_elliptical(d);
        CHECK((t.x * t.x.transpose() - 60.0 * Matrix::Identity(20, 20)).norm() <= 1e-8 * 60.0);
        Dataset twice = precondition_elliptical(t);
        CHECK((twice.x - t.x).norm() <= 1e-8 * t.x.norm());
        CHECK((twice.y - t.y).norm() <= 1e-8 * std::max(1.0, t.y.norm()));
    }
    CHECK_THROWS_AS(precondition_elliptical(design(oracle::gaussian(30, 10, 1))), ConfigError);
    Matrix sing = oracle::gaussian(5, 20, 2);
    sing.row(4) = sing.row(3);
    CHECK_THROWS_AS(precondition_elliptical(design(sing)), NumericalError);
}

TEST_CASE("irrepresentable statistic is below 1 on most Gaussian designs") {
    int below = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Matrix x = oracle::gaussian(500, 50, 1000 + seed);
        std::vector<Index> s{3, 20, 41};
        std::vector<double> sg{1.0, -1.0, 1.0};
        if (check_a3(design(x), s, sg) < 1.0) ++below;
    }
    CHECK(below >= 38);
}

TEST_CASE("diagnose never throws and reports problems as warnings") {
    Matrix x = oracle::gaussian(30, 5, 11);
    x.col(2) = x.col(0);
    std::vector<Index> s{0, 2};
    std::vector<double> sg{1.0, 1.0};
    ConditionReport r = diagnose(design(x), s, sg, true, 3);
    CHECK(r.per_subset);
    CHECK(r.subset_id == 3);
    CHECK(r.v2_hat < 1e-6);
    CHECK(r.warnings.size() >= 2);

    Matrix q = oracle::orthogonal_design(30, 5, 12);
    ConditionReport ok = diagnose(design(q), std::vector<Index>{1, 4}, std::vector<double>{1.0, 1.0});
    CHECK(ok.warnings.empty());
    CHECK(ok.irrepresentable_stat <= 1e-12);
    CHECK(ok.eta_hat == doctest::Approx(1.0));
    REQUIRE(ok.sparse_riesz_rho.has_value());
    CHECK(*ok.sparse_riesz_rho == doctest::Approx(1.0).epsilon(1e-12));

    ConditionReport empty = diagnose(design(q), std::vector<Index>{}, std::vector<double>{});
    CHECK_FALSE(empty.warnings.empty());
}

#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code.

#include "msgest/dataset.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using msgest::Dataset;
using msgest::Index;
using msgest::Matrix;
using msgest::Task;
using msgest::Vector;

inline Matrix gaussian(Index n, Index p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix x(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) x(i, j) = z(rng);
    return x;
}

inline Vector gaussian_vec(Index n, std::uint64_t seed) { return gaussian(n, 1, seed).col(0); }

inline Dataset make(const Matrix& x, const Vector& y, Task task = Task::regression) {
    Dataset d;
    d.x = x;
    d.y = y;
    d.task = task;
    for (Index j = 0; j < x.cols(); ++j) d.column_names.push_back("x" + std::to_string(j));
    return d;
}

inline Vector population_sd(const Matrix& x) {
    Vector sd(x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        const double mu = x.col(j).mean();
        sd[j] = std::sqrt((x.col(j).array() - mu).square().mean());
    }
    return sd;
}

/// Worst violation of the optimality conditions of
/// (1/n)||y - b0 - X b||^2 + lambda sum_j w_j |b_j| with free intercept b0.
inline double lasso_kkt_residual(const Matrix& x, const Vector& y, const Vector& b, double b0, double lambda,
                                 const Vector& w) {
    const double n = static_cast<double>(x.rows());
    const Vector r = y - x * b - Vector::Constant(x.rows(), b0);
    double worst = std::abs(2.0 * r.sum() / n);
    for (Index j = 0; j < x.cols(); ++j) {
        const double g = 2.0 * x.col(j).dot(r) / n;
        const double t = lambda * w[j];
        if (b[j] == 0.0)
            worst = std::max(worst, std::max(0.0, std::abs(g) - t));
        else
            worst = std::max(worst, std::abs(g - t * (b[j] > 0 ? 1.0 : -1.0)));
    }
    return worst;
}

/// Centered columns with X'X = n I exactly (up to rounding).
inline Matrix orthogonal_design(Index n, Index p, std::uint64_t seed) {
    Matrix z = gaussian(n, p, seed);
    z.rowwise() -= z.colwise().mean();
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(n, p);
    return q * std::sqrt(static_cast<double>(n));
}

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

struct LeastSquares {
    Vector beta;  // full length, zeros off cols
    double intercept = 0.0;
    double rss = 0.0;
};

/// Least squares through an SVD of [1, X_cols].
inline LeastSquares least_squares(const Matrix& x, const Vector& y, const std::vector<Index>& cols,
                                  bool intercept = true) {
    const Index k = static_cast<Index>(cols.size()) + (intercept ? 1 : 0);
    Matrix a(x.rows(), k);
    Index c = 0;
    if (intercept) a.col(c++).setOnes();
    for (Index j : cols) a.col(c++) = x.col(j);
    LeastSquares out;
    out.beta = Vector::Zero(x.cols());
    if (k == 0) {
        out.rss = y.squaredNorm();
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector coef = svd.solve(y);
    c = 0;
    if (intercept) out.intercept = coef[c++];
    for (Index j : cols) out.beta[j] = coef[c++];
    out.rss = (y - a * coef).squaredNorm();
    return out;
}

inline double gic_oracle(const Matrix& x, const Vector& y, const std::vector<Index>& cols, double lambda_gic) {
    const double n = static_cast<double>(x.rows());
    const LeastSquares ls = least_squares(x, y, cols);
    return n * std::log(ls.rss / n) + lambda_gic * static_cast<double>(cols.size());
}

inline std::vector<Index> bits_to_indices(std::uint32_t mask, int p) {
    std::vector<Index> out;
    for (int j = 0; j < p; ++j)
        if (mask & (1u << j)) out.push_back(j);
    return out;
}

/// Minimum total Hamming distance to the inputs over all 2^p candidates.
inline int hamming_argmin_value(const std::vector<std::vector<std::uint8_t>>& gammas, int p) {
    int best = std::numeric_limits<int>::max();
    for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
        int total = 0;
        for (const auto& g : gammas)
            for (int j = 0; j < p; ++j) total += ((mask >> j) & 1u) != g[static_cast<std::size_t>(j)];
        best = std::min(best, total);
    }
    return best;
}

inline int hamming_total(const std::vector<std::uint8_t>& cand, const std::vector<std::vector<std::uint8_t>>& gammas) {
    int total = 0;
    for (const auto& g : gammas)
        for (std::size_t j = 0; j < cand.size(); ++j) total += cand[j] != g[j];
    return total;
}

/// Eigenvalues of a symmetric 3x3 matrix by the trigonometric closed form,
/// ascending.
inline std::array<double, 3> symmetric_eigenvalues_3x3(const Matrix& a) {
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
    if (p1 == 0.0) {
        std::array<double, 3> e{a(0, 0), a(1, 1), a(2, 2)};
        std::sort(e.begin(), e.end());
        return e;
    }
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                      2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    const Matrix b = (a - q * Matrix::Identity(3, 3)) / p;
    const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    std::array<double, 3> e{e1, e2, e3};
    std::sort(e.begin(), e.end());
    return e;
}

/// Sparse Riesz minimum over all column subsets of size 1..s, enumerated as
/// bitmasks. Uses the same Gram expression and eigensolver as a plain
/// textbook evaluation.
inline double sparse_riesz_bruteforce(const Matrix& x, int s) {
    const int p = static_cast<int>(x.cols());
    const Matrix gram = x.transpose() * x / static_cast<double>(x.rows());
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < (1u << p); ++mask) {
        const int k = std::popcount(mask);
        if (k > s) continue;
        const auto idx = bits_to_indices(mask, p);
        Matrix sub(k, k);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) sub(a, b) = gram(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(sub, Eigen::EigenvaluesOnly);
        best = std::min(best, es.eigenvalues().minCoeff());
    }
    return best;
}

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

/// Gradient of (1/n) NLL with respect to (b0, b).
inline Vector logistic_gradient(const Matrix& x, const Vector& y, const Vector& b, double b0) {
    const double n = static_cast<double>(x.rows());
    Vector eta = x * b;
    eta.array() += b0;
    Vector r(x.rows());
    for (Index i = 0; i < x.rows(); ++i) r[i] = sigmoid(eta[i]) - y[i];
    Vector g(x.cols() + 1);
    g[0] = r.sum() / n;
    g.tail(x.cols()) = x.transpose() * r / n;
    return g;
}

/// Stationarity residual of (1/n) NLL + lambda sum_j w_j |b_j|.
inline double logistic_lasso_residual(const Matrix& x, const Vector& y, const Vector& b, double b0, double lambda,
                                      const Vector& w) {
    const Vector g = logistic_gradient(x, y, b, b0);
    double worst = std::abs(g[0]);
    for (Index j = 0; j < x.cols(); ++j) {
        const double gj = g[j + 1], t = lambda * w[j];
        if (b[j] == 0.0)
            worst = std::max(worst, std::max(0.0, std::abs(gj) - t));
        else
            worst = std::max(worst, std::abs(gj + t * (b[j] > 0 ? 1.0 : -1.0)));
    }
    return worst;
}

inline double sum_of_distances(const Matrix& points, const Vector& z) {
    double s = 0.0;
    for (Index i = 0; i < points.rows(); ++i) s += (points.row(i).transpose() - z).norm();
    return s;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("msgest_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace oracle

#include "msgest/diagnostics.hpp"

#include "msgest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace msgest {

namespace {

void check_support(const Dataset& d, std::span<const Index> support) {
    if (support.empty()) throw ConfigError("support must be nonempty");
    for (Index j : support)
        if (j < 0 || j >= d.cols()) throw ConfigError("support index " + std::to_string(j) + " out of range");
    if (static_cast<Index>(support.size()) > d.rows()) throw ConfigError("support larger than n");
}

Matrix columns(const Matrix& x, std::span<const Index> cols) {
    Matrix out(x.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = x.col(cols[k]);
    return out;
}

double min_eigenvalue(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double binomial(Index p, Index s) {
    double c = 1.0;
    for (Index k = 1; k <= s; ++k) c = c * static_cast<double>(p - s + k) / static_cast<double>(k);
    return c;
}

} // namespace

A1Stats check_a1(const Dataset& d, std::span<const Index> support) {
    d.validate();
    check_support(d, support);
    const double inv_n = 1.0 / static_cast<double>(d.rows());
    A1Stats a;
    a.v1_hat = d.x.colwise().squaredNorm().maxCoeff() * inv_n;
    Matrix xs = columns(d.x, support);
    a.v2_hat = min_eigenvalue(xs.transpose() * xs * inv_n);
    return a;
}

double check_a3(const Dataset& d, std::span<const Index> support, std::span<const double> signs) {
    d.validate();
    check_support(d, support);
    if (signs.size() != support.size()) throw ConfigError("signs and support lengths differ");
    Matrix xs = columns(d.x, support);
    Matrix gram = xs.transpose() * xs;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const Vector ev = eig.eigenvalues();
    if (eig.info() != Eigen::Success || !(ev.minCoeff() > 1e-10 * ev.maxCoeff()))
        throw NumericalError("support Gram matrix is singular");
    Eigen::LDLT<Matrix> ldlt(gram);
    Vector sgn(static_cast<Index>(signs.size()));
    for (std::size_t k = 0; k < signs.size(); ++k) sgn[static_cast<Index>(k)] = signs[k];
    const Vector w = xs * ldlt.solve(sgn);  // X_S (X_S'X_S)^{-1} sign
    std::vector<bool> in_s(static_cast<std::size_t>(d.cols()), false);
    for (Index j : support) in_s[static_cast<std::size_t>(j)] = true;
    double stat = 0.0;
    for (Index j = 0; j < d.cols(); ++j)
        if (!in_s[static_cast<std::size_t>(j)]) stat = std::max(stat, std::abs(d.x.col(j).dot(w)));
    return stat;
}

double check_a4(const Dataset& d, Index s, double max_subsets) {
    d.validate();
    const Index p = d.cols();
    if (s < 1 || s > p) throw ConfigError("sparse Riesz check needs 1 <= s <= p");
    if (binomial(p, s) > max_subsets) {
        std::ostringstream msg;
        msg << "sparse Riesz enumeration needs C(" << p << ", " << s << ") subsets, more than the limit "
            << max_subsets << "; use a smaller s or fewer columns";
        throw ConfigError(msg.str());
    }
    const Matrix gram = d.x.transpose() * d.x / static_cast<double>(d.rows());
    double rho = std::numeric_limits<double>::infinity();
    std::vector<Index> comb;
    for (Index k = 1; k <= s; ++k) {
        comb.resize(static_cast<std::size_t>(k));
        for (Index i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
        Matrix sub(k, k);
        while (true) {
            for (Index a = 0; a < k; ++a)
                for (Index b = 0; b < k; ++b)
                    sub(a, b) = gram(comb[static_cast<std::size_t>(a)], comb[static_cast<std::size_t>(b)]);
            rho = std::min(rho, min_eigenvalue(sub));
            // next combination in lexicographic order
            Index i = k - 1;
            while (i >= 0 && comb[static_cast<std::size_t>(i)] == p - k + i) --i;
            if (i < 0) break;
            ++comb[static_cast<std::size_t>(i)];
            for (Index j = i + 1; j < k; ++j)
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return rho;
}

Dataset precondition_elliptical(const Dataset& d) {
    d.validate();
    const Index n = d.rows(), p = d.cols();
    if (p <= n)
        throw ConfigError("elliptical preconditioning needs p > n (p=" + std::to_string(p) +
                          ", n=" + std::to_string(n) + ")");
    const Matrix a = d.x * d.x.transpose() / static_cast<double>(p);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const Vector& ev = es.eigenvalues();
    if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff())) throw NumericalError("XX' is singular");
    const Matrix inv_sqrt = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                            es.eigenvectors().transpose();
    Dataset out = d;
    out.x = inv_sqrt * d.x;
    out.y = inv_sqrt * d.y;
    out.task = Task::regression;
    return out;
}

ConditionReport diagnose(const Dataset& d, std::span<const Index> support, std::span<const double> signs,
                         bool per_subset, std::optional<int> subset_id) {
    ConditionReport r;
    r.per_subset = per_subset;
    r.subset_id = subset_id;
    r.support.assign(support.begin(), support.end());
    if (support.empty()) {
        r.v1_hat = d.x.colwise().squaredNorm().maxCoeff() / static_cast<double>(d.rows());
        r.warnings.push_back("empty support: eigenvalue and irrepresentable checks skipped");
        return r;
    }
    try {
        auto a1 = check_a1(d, support);
        r.v1_hat = a1.v1_hat;
        r.v2_hat = a1.v2_hat;
        if (r.v2_hat < 1e-6) r.warnings.push_back("v2_hat below 1e-6: support Gram is (nearly) singular");
    } catch (const Error& e) {
        r.warnings.push_back(std::string("eigenvalue check failed: ") + e.what());
    }
    try {
        r.irrepresentable_stat = check_a3(d, support, signs);
        r.eta_hat = 1.0 - r.irrepresentable_stat;
        if (r.irrepresentable_stat >= 1.0) r.warnings.push_back("irrepresentable statistic >= 1");
    } catch (const Error& e) {
        r.irrepresentable_stat = std::numeric_limits<double>::quiet_NaN();
        r.eta_hat = std::numeric_limits<double>::quiet_NaN();
        r.warnings.push_back(std::string("irrepresentable check failed: ") + e.what());
    }
    try {
        r.sparse_riesz_rho = check_a4(d, static_cast<Index>(support.size()));
    } catch (const Error& e) {
        r.warnings.push_back(std::string("sparse Riesz check skipped: ") + e.what());
    }
    return r;
}

} // namespace msgest

#include "msgest/solvers.hpp"

#include "design.hpp"
#include "msgest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace msgest {

using detail::gather_columns;
using detail::well_conditioned;

void GicConfig::validate() const {
    if (penalty == GicPenalty::custom && !(custom_lambda > 0.0))
        throw ConfigError("custom GIC lambda must be > 0");
}

double GicConfig::lambda(Index n, Index p) const {
    const double dn = static_cast<double>(n), dp = static_cast<double>(p);
    switch (penalty) {
    case GicPenalty::ric:
        if (p < 2) throw ConfigError("RIC penalty needs p >= 2");
        return 2.0 * (std::log(dp) + std::log(std::log(dp)));
    case GicPenalty::ebic: return 2.0 * std::log(dp) + std::log(dn);
    case GicPenalty::bic: return std::log(dn);
    case GicPenalty::custom: return custom_lambda;
    }
    return 0.0;
}

namespace {

constexpr double kZeroRss = 1e-20;  // relative to the total sum of squares

void check_gamma(const Dataset& d, const InclusionVector& gamma) {
    if (static_cast<Index>(gamma.size()) != d.cols())
        throw ConfigError("inclusion vector has length " + std::to_string(gamma.size()) + ", expected p=" +
                          std::to_string(d.cols()));
}

struct LeastSquares {
    Vector coef;  // on the gathered columns
    double rss = 0.0;
};

// QR least squares on centered (intercept) or raw columns.
LeastSquares solve_ls(const Dataset& d, const std::vector<Index>& cols, bool intercept) {
    Matrix xs = gather_columns(d.x, cols, intercept);
    if (!xs.allFinite() || !d.y.allFinite()) throw DataError("dataset contains non-finite values");
    if (!well_conditioned(xs.transpose() * xs))
        throw NumericalError("selected columns are rank deficient (condition number of X'X >= 1e12)");
    Vector yc = d.y;
    if (intercept) yc.array() -= d.y.mean();
    Eigen::ColPivHouseholderQR<Matrix> qr(xs);
    LeastSquares ls;
    ls.coef = qr.solve(yc);
    ls.rss = (yc - xs * ls.coef).squaredNorm();
    return ls;
}

double regression_score(double rss, double tss, Index n, double penalty) {
    if (rss <= kZeroRss * tss || rss <= 0.0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(n) * std::log(rss / static_cast<double>(n)) + penalty;
}

double deviance_score(const Dataset& d, const InclusionVector& gamma, double penalty) {
    auto fit = logistic_irls(d, gamma);
    if (fit.separated || !fit.converged)
        throw NumericalError("logistic fit on candidate model did not converge (separation)");
    return 2.0 * static_cast<double>(d.rows()) * fit.nll + penalty;
}

bool lex_less(const std::vector<Index>& a, const std::vector<Index>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

} // namespace

CoefficientVector ols_fit(const Dataset& d, const InclusionVector& gamma, bool intercept) {
    d.validate();
    check_gamma(d, gamma);
    auto cols = gamma.indices();
    if (cols.empty()) throw ConfigError("ols_fit needs at least one selected column");
    if (static_cast<Index>(cols.size()) + (intercept ? 1 : 0) > d.rows())
        throw NumericalError("more coefficients than rows in ols_fit");
    auto ls = solve_ls(d, cols, intercept);
    CoefficientVector out;
    out.values = Vector::Zero(d.cols());
    out.method = "ols";
    double shift = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        out.values[cols[k]] = ls.coef[static_cast<Index>(k)];
        shift += ls.coef[static_cast<Index>(k)] * d.x.col(cols[k]).mean();
    }
    out.intercept = intercept ? d.y.mean() - shift : 0.0;
    return out;
}

double gic_score(const Dataset& d, const InclusionVector& gamma, const GicConfig& cfg) {
    d.validate();
    check_gamma(d, gamma);
    cfg.validate();
    const Index n = d.rows();
    const auto k = static_cast<Index>(gamma.count());
    const double penalty = cfg.lambda(n, d.cols()) * static_cast<double>(k);
    if (d.task == Task::classification) return deviance_score(d, gamma, penalty);

    if (k + 1 >= n) throw NumericalError("candidate model leaves no residual degrees of freedom");
    const double tss = (d.y.array() - d.y.mean()).square().sum();
    const double rss = k == 0 ? tss : solve_ls(d, gamma.indices(), true).rss;
    return regression_score(rss, tss, n, penalty);
}

InclusionVector gic_select(const Dataset& d, const std::vector<InclusionVector>& candidates,
                           const GicConfig& cfg) {
    d.validate();
    cfg.validate();
    if (candidates.empty()) throw ConfigError("gic_select needs at least one candidate");
    for (const auto& g : candidates) check_gamma(d, g);

    // Distinct supports ordered by (size, index list): the scan order realizes
    // the tie rule and lets a lower bound end the scan early.
    std::vector<std::vector<Index>> order;
    {
        std::set<std::vector<std::uint8_t>> seen;
        for (const auto& g : candidates)
            if (seen.insert(g.bits()).second) order.push_back(g.indices());
        std::sort(order.begin(), order.end(), lex_less);
    }

    const Index n = d.rows(), p = d.cols();
    const double lam = cfg.lambda(n, p);
    double best = std::numeric_limits<double>::infinity();
    const std::vector<Index>* best_cols = nullptr;

    if (d.task == Task::classification) {
        for (const auto& cols : order) {
            const double penalty = lam * static_cast<double>(cols.size());
            if (best_cols && penalty > best) break;  // deviance >= 0
            double score;
            try {
                score = deviance_score(d, InclusionVector::from_indices(static_cast<std::size_t>(p), cols),
                                       penalty);
            } catch (const NumericalError&) {
                continue;
            }
            if (score < best || !best_cols) {
                best = score;
                best_cols = &cols;
            }
        }
    } else {
        // Gram-based residual sums of squares on the union of candidate columns.
        std::vector<Index> uni;
        for (const auto& cols : order) uni.insert(uni.end(), cols.begin(), cols.end());
        std::sort(uni.begin(), uni.end());
        uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
        std::vector<Index> pos(static_cast<std::size_t>(p), -1);
        for (std::size_t k = 0; k < uni.size(); ++k) pos[static_cast<std::size_t>(uni[k])] = static_cast<Index>(k);

        if (!d.x.allFinite() || !d.y.allFinite()) throw DataError("dataset contains non-finite values");
        Matrix xu = gather_columns(d.x, uni, true);
        Vector yc = d.y.array() - d.y.mean();
        Matrix gram = xu.transpose() * xu;
        Vector xty = xu.transpose() * yc;
        const double tss = yc.squaredNorm();

        // Any candidate's RSS is at least the RSS of the union model.
        double floor_term = -std::numeric_limits<double>::infinity();
        if (static_cast<Index>(uni.size()) + 1 < n && well_conditioned(gram)) {
            Eigen::LLT<Matrix> llt(gram);
            double rss_floor = tss - xty.dot(llt.solve(xty));
            if (rss_floor > 1e-8 * tss)
                floor_term = static_cast<double>(n) * std::log(rss_floor / static_cast<double>(n));
        }

        for (const auto& cols : order) {
            const auto k = static_cast<Index>(cols.size());
            const double penalty = lam * static_cast<double>(k);
            if (best_cols && floor_term + penalty > best) break;
            if (k + 1 >= n) continue;
            double rss = tss;
            if (k > 0) {
                Matrix sub(k, k);
                Vector rhs(k);
                for (Index a = 0; a < k; ++a) {
                    Index ia = pos[static_cast<std::size_t>(cols[static_cast<std::size_t>(a)])];
                    rhs[a] = xty[ia];
                    for (Index b = 0; b < k; ++b)
                        sub(a, b) = gram(ia, pos[static_cast<std::size_t>(cols[static_cast<std::size_t>(b)])]);
                }
                if (!well_conditioned(sub)) continue;
                Eigen::LLT<Matrix> llt(sub);
                rss = tss - rhs.dot(llt.solve(rhs));
                if (rss < 1e-8 * tss) rss = solve_ls(d, cols, true).rss;  // cancellation-prone regime
            }
            double score = regression_score(rss, tss, n, penalty);
            if (score < best || !best_cols) {
                best = score;
                best_cols = &cols;
            }
        }
    }
    if (!best_cols) throw NumericalError("gic_select: every candidate model is rank deficient");
    return InclusionVector::from_indices(static_cast<std::size_t>(p), *best_cols);
}

} // namespace msgest

#include "design.hpp"

#include "msgest/errors.hpp"

#include <cmath>

namespace msgest::detail {

CenteredDesign::CenteredDesign(const Dataset& d, bool standardize) {
    d.validate();
    if (!d.x.allFinite() || !d.y.allFinite()) throw DataError("dataset contains non-finite values");
    const Index n = d.rows(), p = d.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    y_ = d.y;
    y_mean_ = d.y.mean();
    yc_ = d.y.array() - y_mean_;
    x_mean_ = d.x.colwise().mean().transpose();
    xc_ = d.x.rowwise() - x_mean_.transpose();
    scale_ = Vector::Ones(p);
    usable_.assign(static_cast<std::size_t>(p), true);
    diag_.resize(p);
    for (Index j = 0; j < p; ++j) {
        double var = xc_.col(j).squaredNorm() * inv_n;
        double tiny = 1e-28 * std::max(1.0, x_mean_[j] * x_mean_[j]);
        if (!(var > tiny)) {
            usable_[static_cast<std::size_t>(j)] = false;
            xc_.col(j).setZero();
            diag_[j] = 0.0;
            continue;
        }
        if (standardize) {
            scale_[j] = std::sqrt(var);
            xc_.col(j) /= scale_[j];
            diag_[j] = 1.0;
        } else {
            diag_[j] = var;
        }
    }
    xty_ = xc_.transpose() * yc_ * inv_n;
    yy_ = yc_.squaredNorm() * inv_n;
    gram_.resize(static_cast<std::size_t>(p));
    have_gram_.assign(static_cast<std::size_t>(p), false);
}

const Vector& CenteredDesign::gram_col(Index k) {
    auto idx = static_cast<std::size_t>(k);
    if (!have_gram_[idx]) {
        gram_[idx] = xc_.transpose() * xc_.col(k) / static_cast<double>(n());
        have_gram_[idx] = true;
    }
    return gram_[idx];
}

CoefficientVector CenteredDesign::to_raw(const Vector& b, double centered_intercept) const {
    CoefficientVector out;
    out.values = b.cwiseQuotient(scale_);
    out.intercept = centered_intercept - out.values.dot(x_mean_);
    return out;
}

bool well_conditioned(const Matrix& gram) {
    if (gram.size() == 0) return true;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) return false;
    return llt.rcond() > 1e-12;
}

Matrix gather_columns(const Matrix& x, const std::vector<Index>& cols, bool center) {
    Matrix out(x.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        auto c = static_cast<Index>(k);
        out.col(c) = x.col(cols[k]);
        if (center) out.col(c).array() -= out.col(c).mean();
    }
    return out;
}

} // namespace msgest::detail

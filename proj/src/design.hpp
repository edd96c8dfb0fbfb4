#pragma once

// Centered (and optionally scaled) design shared by the coordinate-descent
// solvers. Not part of the public interface.

#include "msgest/dataset.hpp"

#include <vector>

namespace msgest::detail {

class CenteredDesign {
public:
    CenteredDesign(const Dataset& d, bool standardize);

    Index n() const noexcept { return xc_.rows(); }
    Index p() const noexcept { return xc_.cols(); }

    const Matrix& xc() const noexcept { return xc_; }
    const Vector& yc() const noexcept { return yc_; }
    const Vector& x_mean() const noexcept { return x_mean_; }
    const Vector& scale() const noexcept { return scale_; }
    double y_mean() const noexcept { return y_mean_; }
    const Vector& y() const noexcept { return y_; }

    /// False for zero-variance columns; their coefficient stays at zero.
    bool usable(Index j) const noexcept { return usable_[static_cast<std::size_t>(j)]; }

    /// xc_j' yc / n
    const Vector& xty() const noexcept { return xty_; }
    /// xc_j' xc_j / n
    const Vector& diag() const noexcept { return diag_; }
    /// yc' yc / n
    double yy() const noexcept { return yy_; }

    /// Column k of xc' xc / n, computed on first use.
    const Vector& gram_col(Index k);

    /// Raw-scale coefficients from scaled ones, intercept from the centered one.
    CoefficientVector to_raw(const Vector& b, double centered_intercept) const;

private:
    Matrix xc_;
    Vector yc_, y_;
    Vector x_mean_, scale_;
    double y_mean_ = 0.0;
    std::vector<bool> usable_;
    Vector xty_, diag_;
    double yy_ = 0.0;
    std::vector<Vector> gram_;
    std::vector<bool> have_gram_;
};

inline double soft_threshold(double u, double t) noexcept {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
}

/// True when the symmetric positive semidefinite `gram` has an estimated
/// condition number below 1e12.
bool well_conditioned(const Matrix& gram);

/// Columns of `x` listed in `cols`, centered when `center` is set.
Matrix gather_columns(const Matrix& x, const std::vector<Index>& cols, bool center);

} // namespace msgest::detail

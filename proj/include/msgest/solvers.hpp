#pragma once

#include "msgest/dataset.hpp"
#include "msgest/types.hpp"

#include <optional>
#include <vector>

namespace msgest {

/// Settings shared by the linear and logistic Lasso solvers.
///
/// With `standardize` on, columns are scaled to unit population variance
/// before fitting, which is the same as penalizing each |beta_j| by the
/// column's standard deviation. Coefficients are always returned on the raw
/// scale. Every model carries an unpenalized intercept.
struct LassoConfig {
    std::vector<double> lambda_grid;  // strictly descending; empty means auto grid
    int n_lambda = 100;
    double lambda_min_ratio = 1e-3;
    double tol = 1e-7;  // max coordinate change, standardized units
    int max_iter = 10000;
    bool standardize = true;
    bool record_trace = false;  // keep the objective after every sweep

    void validate() const;
};

enum class GicPenalty { ric, ebic, bic, custom };

struct GicConfig {
    GicPenalty penalty = GicPenalty::bic;
    double custom_lambda = 0.0;

    void validate() const;
    /// Per-feature penalty: ric 2(log p + log log p), ebic 2 log p + log n, bic log n.
    double lambda(Index n, Index p) const;
};

struct FitResult {
    CoefficientVector beta;
    InclusionVector gamma;
    double lambda = 0.0;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
};

/// Minimizes (1/n)||y - b0 - X beta||^2 + lambda * sum_j w_j |beta_j| by cyclic
/// coordinate descent with covariance updates.
FitResult lasso_cd(const Dataset& d, double lambda, const LassoConfig& cfg = {});

/// Warm-started solutions over the configured grid (or the auto grid from
/// lambda_max down to lambda_min_ratio * lambda_max).
std::vector<FitResult> lasso_path(const Dataset& d, const LassoConfig& cfg = {});

/// Smallest lambda giving the empty model.
double lasso_lambda_max(const Dataset& d, const LassoConfig& cfg = {});

/// n log(RSS/n) + lambda_GIC |gamma| with RSS from OLS (plus intercept) on gamma.
/// A zero RSS scores -infinity.
double gic_score(const Dataset& d, const InclusionVector& gamma, const GicConfig& cfg);

/// Argmin of the GIC score; ties go to the smaller model, then to the
/// lexicographically smaller index list. Rank-deficient candidates are skipped.
/// For classification data the score uses the logistic deviance in place of
/// n log(RSS/n).
InclusionVector gic_select(const Dataset& d, const std::vector<InclusionVector>& candidates,
                           const GicConfig& cfg);

/// Least squares on the columns in gamma; zeros elsewhere.
CoefficientVector ols_fit(const Dataset& d, const InclusionVector& gamma, bool intercept = true);

struct LogisticFit {
    CoefficientVector beta;
    double nll = 0.0;  // mean negative log-likelihood
    double max_score = 0.0;
    int iterations = 0;
    bool converged = false;
    bool separated = false;
};

/// Newton / IRLS maximum likelihood with step halving on the columns in gamma.
/// Convergence is declared when every component of the mean score falls below
/// `tol`.
LogisticFit logistic_irls(const Dataset& d, const InclusionVector& gamma, double tol = 1e-8,
                          int max_iter = 100, bool intercept = true);

/// Minimizes (1/n) NLL + lambda * sum_j w_j |beta_j| by proximal Newton with a
/// weighted coordinate-descent inner loop.
FitResult logistic_lasso(const Dataset& d, double lambda, const LassoConfig& cfg = {});

/// Warm-started logistic path. Stops early once 99.9% of the null deviance is
/// explained or a fit fails to converge, so it may return fewer than K fits.
std::vector<FitResult> logistic_lasso_path(const Dataset& d, const LassoConfig& cfg = {});

double logistic_lambda_max(const Dataset& d, const LassoConfig& cfg = {});

/// Descending log-spaced grid of `k` values from `lambda_max` to
/// `ratio * lambda_max`.
std::vector<double> log_grid(double lambda_max, int k, double ratio);

} // namespace msgest

#pragma once

#include "msgest/types.hpp"

#include <vector>

namespace msgest {

/// Coordinatewise strict majority vote; an exact tie at m/2 excludes the
/// feature. This is a minimizer of sum_i ||gamma - gamma_i||_1.
InclusionVector median_model(const std::vector<InclusionVector>& gammas);

/// Coordinatewise mean of values and intercepts.
CoefficientVector average_coefficients(const std::vector<CoefficientVector>& betas);

struct GeometricMedianOptions {
    double tol = 1e-9;
    int max_iter = 10000;
};

/// Minimizer of sum_i ||z - beta_i||_2 over (intercept, values) jointly.
/// Weiszfeld iteration with the Vardi-Zhang correction at data points;
/// collinear inputs reduce to a one-dimensional median.
CoefficientVector geometric_median(const std::vector<CoefficientVector>& betas,
                                   const GeometricMedianOptions& opts = {});

/// Point-set version on raw vectors (rows of `points`).
Vector geometric_median(const Matrix& points, const GeometricMedianOptions& opts = {});

/// Sum of Euclidean distances from `z` to the rows of `points`.
double geometric_median_objective(const Matrix& points, const Vector& z);

/// Features selected in every input model.
InclusionVector intersect_models(const std::vector<InclusionVector>& gammas);

} // namespace msgest

#pragma once

#include "msgest/dataset.hpp"
#include "msgest/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace msgest {

/// Computable versions of the design conditions behind selection consistency.
/// All Gram matrices are on the raw (uncentered) columns, scaled by 1/n.
struct ConditionReport {
    double v1_hat = 0.0;                 // max_j ||x_j||^2 / n
    double v2_hat = 0.0;                 // lambda_min(X_S'X_S / n)
    double irrepresentable_stat = 0.0;   // max_{j not in S} |x_j'X_S (X_S'X_S)^{-1} sign(beta_S)|
    double eta_hat = 1.0;                // 1 - irrepresentable_stat
    std::optional<double> sparse_riesz_rho;  // min over |pi| <= s of lambda_min(X_pi'X_pi / n)
    bool per_subset = false;
    std::optional<int> subset_id;
    std::vector<Index> support;
    std::vector<std::string> warnings;
};

struct A1Stats {
    double v1_hat = 0.0;
    double v2_hat = 0.0;
};

A1Stats check_a1(const Dataset& d, std::span<const Index> support);

double check_a3(const Dataset& d, std::span<const Index> support, std::span<const double> signs);

/// Exhaustive minimum eigenvalue over all column subsets of size 1..s.
/// Throws ConfigError when C(p, s) exceeds `max_subsets`.
double check_a4(const Dataset& d, Index s, double max_subsets = 1e6);

/// (XX'/p)^{-1/2} applied to X and y; needs p > n.
Dataset precondition_elliptical(const Dataset& d);

/// Runs every check that applies; failures become warnings, never errors.
ConditionReport diagnose(const Dataset& d, std::span<const Index> support, std::span<const double> signs,
                         bool per_subset = false, std::optional<int> subset_id = std::nullopt);

} // namespace msgest

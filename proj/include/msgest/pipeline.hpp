#pragma once

#include "msgest/dataset.hpp"
#include "msgest/executor.hpp"
#include "msgest/solvers.hpp"
#include "msgest/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace msgest {

enum class Method { message, full_data, averaging, geometric_median, bolasso };

/// How each subset picks its model: a Lasso path scored by GIC, or a single
/// Lasso fit at a fixed lambda.
struct SelectorConfig {
    enum class Kind { lasso_gic, lasso_fixed };
    Kind kind = Kind::lasso_gic;
    GicConfig gic;
    LassoConfig lasso;
    double lambda = 0.1;  // lasso_fixed only

    void validate() const;
};

struct MethodConfig {
    Method method = Method::message;
    SelectorConfig selector;
    int m = 1;
    int bolasso_B = 32;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Simulated traffic between the subset machines and the center.
struct CommLedger {
    std::int64_t uplink_bits = 0;
    std::int64_t downlink_bits = 0;
    std::int64_t uplink_floats = 0;
    std::int64_t rounds = 0;

    bool operator==(const CommLedger&) const = default;
};

struct MethodResult {
    Method method = Method::message;
    CoefficientVector beta;
    InclusionVector gamma;
    CommLedger ledger;
    /// Critical-path time with one machine per subset: per stage the slowest
    /// subset task (thread CPU time), plus the central steps.
    double wall_time = 0.0;
    /// Local wall-clock time of the call.
    double elapsed_time = 0.0;
    /// Per subset (or per bootstrap sample): gamma is the locally selected
    /// model, beta the local coefficient vector.
    std::vector<FitResult> per_subset;
    int m = 1;
    bool empty_model = false;
};

struct Selection {
    InclusionVector gamma;
    FitResult fit;  // the Lasso fit that produced gamma
};

Selection select_features(const Dataset& d, const SelectorConfig& cfg);

/// OLS (regression) or logistic MLE (classification) on gamma with an
/// intercept; an empty gamma gives the intercept-only model.
CoefficientVector refit(const Dataset& d, const InclusionVector& gamma);

/// Row indices of one bootstrap resample; replaceable for tests.
using ResampleFn = std::function<std::vector<Index>(Index n, std::uint64_t seed)>;
std::vector<Index> bootstrap_indices(Index n, std::uint64_t seed);

MethodResult run_message(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan,
                         const Executor& exec = Executor{1});
MethodResult run_full_data(const Dataset& d, const MethodConfig& cfg);
MethodResult run_averaging(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan,
                           const Executor& exec = Executor{1});
MethodResult run_geometric_median(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan,
                                  const Executor& exec = Executor{1});
MethodResult run_bolasso(const Dataset& d, const MethodConfig& cfg, const Executor& exec = Executor{1},
                         const ResampleFn& resample = bootstrap_indices);

/// Dispatches on cfg.method; `plan` is ignored by full_data and bolasso.
MethodResult run_method(const Dataset& d, const MethodConfig& cfg, const PartitionPlan& plan,
                        const Executor& exec = Executor{1});

/// Ledger implied by the method, m, p and |gamma| of a result.
CommLedger communication_cost(const MethodResult& result);

const char* to_string(Method m) noexcept;
Method method_from_string(const std::string& s);

} // namespace msgest

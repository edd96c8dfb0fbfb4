#pragma once

#include "msgest/dataset.hpp"
#include "msgest/executor.hpp"
#include "msgest/pipeline.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace msgest {

struct ReplicateScore {
    double coef_mse = 0.0;  // ||beta_hat - beta||_2^2, intercept excluded
    bool exact_recovery = false;
    std::optional<double> pred_mse;   // regression test set
    std::optional<double> accuracy;   // classification test set
    double wall_time = 0.0;
    double elapsed_time = 0.0;
    CommLedger comm;
    Index support_size = 0;
    bool empty_model = false;
    std::uint64_t dataset_digest = 0;
    std::uint64_t partition_digest = 0;
    std::optional<std::string> error;  // set when the replicate failed
};

ReplicateScore score_replicate(const MethodResult& result, const GroundTruth& truth,
                               const Dataset* test = nullptr);

struct MetricSummary {
    double mean = 0.0;
    double std_error = 0.0;
    int count = 0;
};

MetricSummary summarize(const std::vector<double>& values);

struct MethodCell {
    std::string label;
    MethodConfig config;
    std::vector<ReplicateScore> scores;  // indexed by replicate
    std::map<std::string, MetricSummary> summary;
};

struct GridCell {
    SyntheticConfig config;
    int m = 1;
    std::vector<MethodCell> methods;
};

struct MonteCarloSpec {
    std::vector<SyntheticConfig> grid;  // seeds are replaced per replicate
    std::vector<MethodConfig> methods;
    int reps = 1;
    std::uint64_t base_seed = 1;
    /// When set, m = max(1, n / subset_size) at every grid point.
    std::optional<Index> subset_size;
    /// Extra rows drawn from the same model for prediction metrics.
    Index n_test = 0;

    void validate() const;
};

struct BenchmarkReport {
    MonteCarloSpec spec;
    std::vector<GridCell> cells;
    bool partial = false;  // some replicate failed
};

/// Paired Monte Carlo: every method sees the same dataset and partition per
/// (grid point, replicate); replicates run on `exec`, methods inside a
/// replicate run serially.
BenchmarkReport monte_carlo(const MonteCarloSpec& spec, const Executor& exec = Executor{1});

/// Recomputes every MethodCell summary from its raw scores.
void summarize_report(BenchmarkReport& report);

/// Dataset seed for (base_seed, grid point, replicate).
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t grid_index, int rep) noexcept;

std::uint64_t partition_digest(const PartitionPlan& plan);

/// Metric names carried in summaries, in output order.
const std::vector<std::string>& metric_names();

} // namespace msgest

#pragma once

#include "msgest/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace msgest {

enum class Task { regression, classification };

/// n x p design matrix with its response. Rows are observations.
struct Dataset {
    Matrix x;
    Vector y;
    std::vector<std::string> column_names;
    Task task = Task::regression;

    Index rows() const noexcept { return x.rows(); }
    Index cols() const noexcept { return x.cols(); }

    /// Throws DataError when the shape or label invariants do not hold.
    void validate() const;

    /// Copy of the given rows, in the given order.
    Dataset select_rows(std::span<const Index> rows) const;
};

enum class NoiseFamily { gaussian, student_t, logistic };

struct GroundTruth {
    Vector beta;
    std::vector<Index> support;  // sorted
    Index s = 0;
    std::optional<double> sigma2;  // absent for the logistic model
    NoiseFamily noise = NoiseFamily::gaussian;
    double noise_param = 0.0;  // sigma for gaussian, df for student_t

    InclusionVector inclusion() const;
};

enum class SyntheticCase { case1, case2, case3 };

struct SyntheticConfig {
    Index n = 1000;
    Index p = 100;
    Index s = 3;
    double rho = 0.0;
    SyntheticCase kind = SyntheticCase::case1;
    std::uint64_t seed = 1;

    void validate() const;
};

struct PartitionPlan {
    int m = 1;
    std::vector<int> assignment;
    std::uint64_t seed = 0;

    /// Row indices of subset `i`, ascending.
    std::vector<Index> subset(int i) const;
    std::vector<std::vector<Index>> subsets() const;
};

struct ScalingRecord {
    Vector mean;
    Vector scale;  // sample standard deviation

    /// Maps coefficients fitted on standardized columns back to the raw scale.
    CoefficientVector to_raw(const CoefficientVector& standardized) const;
    /// Applies the stored transform to another dataset with the same columns.
    Dataset apply(const Dataset& d) const;
};

/// Reads a CSV with a header row. Categorical columns are dummy coded against
/// their lexicographically first level; expanded columns are named "col=level".
Dataset load_csv(const std::filesystem::path& path, const std::string& response,
                 std::span<const std::string> categorical = {},
                 Task task = Task::regression);

/// Writes the dataset with the response as the last column, shortest
/// round-trip formatting for every value.
void write_csv(const Dataset& d, const std::filesystem::path& path,
               const std::string& response = "y");

/// Synthetic sparse design: compound-symmetric Gaussian rows, seeded support,
/// coefficients (-1)^{Ber(0.4)} (8 log n / sqrt(n) + |N(0,1)|). `extra_rows`
/// appends held-out rows from the same model without changing the
/// coefficient law, which always uses cfg.n.
std::pair<Dataset, GroundTruth> generate_synthetic(const SyntheticConfig& cfg, Index extra_rows = 0);

/// Seeded shuffle dealt round-robin into m bins.
PartitionPlan random_partition(Index n, int m, std::uint64_t seed);

/// First n_train rows train, the rest test.
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, Index n_train);

std::pair<Dataset, ScalingRecord> standardize(const Dataset& d);

/// FNV-1a digest of the numeric content, for pairing checks.
std::uint64_t dataset_digest(const Dataset& d);

const char* to_string(Task t) noexcept;
const char* to_string(SyntheticCase c) noexcept;
SyntheticCase synthetic_case_from_string(const std::string& s);

} // namespace msgest

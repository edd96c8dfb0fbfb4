#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace msgest {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Feature-inclusion indicator of a fitted model.
class InclusionVector {
public:
    InclusionVector() = default;
    explicit InclusionVector(std::size_t p) : bits_(p, 0) {}
    explicit InclusionVector(std::vector<std::uint8_t> bits);

    static InclusionVector from_indices(std::size_t p, std::span<const Index> indices);
    /// Coordinates whose value is not exactly zero.
    static InclusionVector support_of(const Vector& values);

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t j) const { return bits_[j] != 0; }
    void set(std::size_t j, bool on) { bits_.at(j) = on ? 1 : 0; }

    std::size_t count() const noexcept;
    std::vector<Index> indices() const;
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    bool operator==(const InclusionVector&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// Dense coefficient vector (zeros off-support) with an unpenalized intercept.
struct CoefficientVector {
    Vector values;
    double intercept = 0.0;
    std::string method;
    std::optional<int> subset_id;

    Index size() const noexcept { return values.size(); }
    InclusionVector support() const { return InclusionVector::support_of(values); }
};

/// splitmix64 finalizer; derives independent stream seeds from (seed, key).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) noexcept;

/// Thread CPU time in seconds.
double thread_cpu_seconds() noexcept;

} // namespace msgest

#include "msgest/types.hpp"

#include "msgest/errors.hpp"

#include <ctime>

namespace msgest {

InclusionVector::InclusionVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

InclusionVector InclusionVector::from_indices(std::size_t p, std::span<const Index> indices) {
    InclusionVector g(p);
    for (Index j : indices) {
        if (j < 0 || static_cast<std::size_t>(j) >= p)
            throw ConfigError("feature index " + std::to_string(j) + " out of range for p=" +
                              std::to_string(p));
        g.bits_[static_cast<std::size_t>(j)] = 1;
    }
    return g;
}

InclusionVector InclusionVector::support_of(const Vector& values) {
    InclusionVector g(static_cast<std::size_t>(values.size()));
    for (Index j = 0; j < values.size(); ++j) g.bits_[static_cast<std::size_t>(j)] = values[j] != 0.0;
    return g;
}

std::size_t InclusionVector::count() const noexcept {
    std::size_t c = 0;
    for (auto b : bits_) c += b;
    return c;
}

std::vector<Index> InclusionVector::indices() const {
    std::vector<Index> out;
    for (std::size_t j = 0; j < bits_.size(); ++j)
        if (bits_[j]) out.push_back(static_cast<Index>(j));
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (key + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double thread_cpu_seconds() noexcept {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

} // namespace msgest

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace msgest {

/// Bounded worker pool for independent tasks. Each task writes only to its own
/// slot, so results never depend on the number of workers.
class Executor {
public:
    /// `threads == 0` picks MSGEST_THREADS from the environment, else the
    /// hardware concurrency.
    explicit Executor(unsigned threads = 1);

    unsigned threads() const noexcept { return threads_; }

    /// Runs fn(i) for i in [0, count). The first exception (lowest index) is
    /// rethrown after every task has finished.
    template <class Fn>
    void parallel_for(std::size_t count, Fn&& fn) const {
        if (count == 0) return;
        std::vector<std::exception_ptr> errors(count);
        auto run_one = [&](std::size_t i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        };
        const std::size_t workers = std::min<std::size_t>(threads_, count);
        if (workers <= 1) {
            for (std::size_t i = 0; i < count; ++i) run_one(i);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < count; i = next++) run_one(i);
                });
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

private:
    unsigned threads_;
};

} // namespace msgest

#include "msgest/executor.hpp"

#include <cstdlib>
#include <string>

namespace msgest {

Executor::Executor(unsigned threads) : threads_(threads) {
    if (threads_ == 0) {
        if (const char* env = std::getenv("MSGEST_THREADS")) {
            try {
                threads_ = static_cast<unsigned>(std::stoul(env));
            } catch (...) {
                threads_ = 0;
            }
        }
    }
    if (threads_ == 0) threads_ = std::max(1u, std::thread::hardware_concurrency());
}

} // namespace msgest

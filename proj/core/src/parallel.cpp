#include "circuflow/parallel.hpp"

#include <cstdlib>
#include <string>

namespace circuflow {

unsigned worker_count() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CIRCUFLOW_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(std::min<long>(v, 1024));
        } catch (const std::exception&) {
        }
    }
    return hw;
}

}  // namespace circuflow

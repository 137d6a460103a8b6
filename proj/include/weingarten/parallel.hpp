#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace weingarten {

/// Worker count: WEINGARTEN_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
inline int thread_count() {
    if (const char* env = std::getenv("WEINGARTEN_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls f(i) for i in [0, n) on contiguous chunks. Every index is visited
/// exactly once; if several chunks throw, the exception from the lowest chunk
/// is rethrown so failures are reported deterministically.
template <typename F>
void parallel_for(Eigen::Index n, F&& f, Eigen::Index min_chunk = 256) {
    const int workers = static_cast<int>(std::min<Eigen::Index>(thread_count(), std::max<Eigen::Index>(1, n / min_chunk)));
    if (workers <= 1) {
        for (Eigen::Index i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    const Eigen::Index chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const Eigen::Index lo = w * chunk;
            const Eigen::Index hi = std::min(n, lo + chunk);
            try {
                for (Eigen::Index i = lo; i < hi; ++i) f(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace weingarten

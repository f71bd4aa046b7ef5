#pragma once

// Deterministic fork/join over an index range. Worker count is capped by the
// RDL_THREADS environment variable; results must be written by index so the
// outcome is independent of scheduling.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rdl {

inline int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("RDL_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && cap < static_cast<long>(hw)) hw = static_cast<unsigned>(cap);
    }
    return static_cast<int>(hw);
}

inline void parallel_for(long n, const std::function<void(long)>& body) {
    if (n <= 0) return;
    const int workers = std::min<long>(worker_count(), n);
    if (workers == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const long i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!failed.exchange(true)) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Pairwise sum in index order; deterministic independent of thread count.
inline double pairwise_sum(const std::vector<double>& values, size_t begin, size_t end) {
    const size_t n = end - begin;
    if (n == 0) return 0.0;
    if (n == 1) return values[begin];
    const size_t mid = begin + n / 2;
    return pairwise_sum(values, begin, mid) + pairwise_sum(values, mid, end);
}

inline double pairwise_sum(const std::vector<double>& values) {
    return pairwise_sum(values, 0, values.size());
}

}  // namespace rdl

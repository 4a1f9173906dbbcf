#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fams {

namespace detail {
inline std::atomic<int>& thread_setting() {
    static std::atomic<int> value{0};
    return value;
}
} // namespace detail

/// Upper bound on worker threads taken from FAMS_THREADS, or the hardware concurrency.
inline int thread_cap() {
    int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("FAMS_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) cap = std::min(cap, v);
        } catch (...) {
        }
    }
    return cap;
}

/// Number of threads used by parallel loops. Zero or negative requests select the cap.
inline void set_thread_count(int n) { detail::thread_setting() = n; }

inline int thread_count() {
    const int requested = detail::thread_setting();
    const int cap = thread_cap();
    return requested > 0 ? std::min(requested, cap) : cap;
}

/// Runs body(i) for i in [0, n). Work is split into contiguous blocks; exceptions are rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t begin = n * t / threads;
            const std::size_t end = n * (t + 1) / threads;
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace fams

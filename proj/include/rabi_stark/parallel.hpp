// rabi_stark/parallel.hpp: deterministic parallel map over an index range
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rabi_stark {

inline constexpr const char* kWorkersEnv = "RABI_STARK_WORKERS";

/// Worker count from RABI_STARK_WORKERS, else the hardware concurrency.
[[nodiscard]] inline unsigned worker_count() {
    if (const char* env = std::getenv(kWorkersEnv)) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) for i in [0, count). Results land in index order, so the
/// output does not depend on scheduling. The first exception is rethrown.
template <class T, class F>
[[nodiscard]] std::vector<T> parallel_map(std::size_t count, F&& fn, unsigned workers = worker_count()) {
    std::vector<T> out(count);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace rabi_stark

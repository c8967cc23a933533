#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace logwitness {

// Worker count for embarrassingly parallel loops. Defaults to 1; the
// LOGWITNESS_THREADS environment variable raises (or caps) it. Results never
// depend on the worker count: tasks are seeded independently and joined by
// index.
inline int worker_count() {
    if (const char* env = std::getenv("LOGWITNESS_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1 && v <= 1024) return static_cast<int>(v);
    }
    return 1;
}

// Runs fn(index) for 0 <= index < count on `workers` threads, striding by
// worker id. fn must only touch per-index state.
template <typename Fn>
inline void parallel_for(std::uint64_t count, int workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t]() {
            for (std::uint64_t i = static_cast<std::uint64_t>(t); i < count;
                 i += static_cast<std::uint64_t>(workers))
                fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace logwitness

#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace tailvine {

// Thread count taken from TAILVINE_THREADS when set, hardware otherwise.
inline unsigned thread_count() {
    if (const char* env = std::getenv("TAILVINE_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Static block partition; body(i) must only write to slot i of preallocated
// output so results are identical for any thread count.
template <class Body>
void parallel_for(std::size_t n, const Body& body, unsigned threads = 0) {
    if (threads == 0) threads = thread_count();
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace tailvine

#pragma once

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace perimax {

// Worker count resolution: explicit argument > PERIMAX_THREADS > hardware.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PERIMAX_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Splits [0, count) into contiguous chunks, one per worker. Each chunk sees
// only its own index range, so per-index outputs land in disjoint slots and
// integer-count reductions are identical for every worker count. The body
// receives (chunk_index, begin, end).
inline void parallel_chunks(std::size_t count, int threads,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    const int workers = resolve_threads(threads);
    if (workers <= 1 || count < 2) {
        body(0, 0, count);
        return;
    }
    const std::size_t w = static_cast<std::size_t>(workers);
    std::vector<std::thread> pool;
    pool.reserve(w);
    const std::size_t chunk = (count + w - 1) / w;
    for (std::size_t k = 0; k < w; ++k) {
        const std::size_t begin = k * chunk;
        if (begin >= count) break;
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&body, k, begin, end] { body(k, begin, end); });
    }
    for (auto& t : pool) t.join();
}

// Number of chunk slots parallel_chunks may touch for a given thread request.
inline std::size_t chunk_slots(int threads) {
    return static_cast<std::size_t>(resolve_threads(threads));
}

} // namespace perimax

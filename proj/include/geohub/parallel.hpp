#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace geohub {

/// Items per work chunk. Fixed so that per-chunk partial results, and the
/// chunk-ordered reductions built on them, do not depend on the worker count.
inline constexpr std::size_t kChunkSize = 2048;

/// Resolves a requested worker count: values <= 0 mean "hardware
/// concurrency"; the GEOHUB_THREADS environment variable caps the result.
int resolve_workers(int requested);

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

/// Calls fn(chunk_index, begin, end) for every chunk of [0, n).
/// The first exception by chunk index is rethrown after all workers join.
template <typename Fn>
void for_each_chunk(std::size_t n, int workers, Fn&& fn) {
    const std::size_t chunks = chunk_count(n);
    if (chunks == 0) return;
    const std::size_t threads =
        std::min<std::size_t>(chunks, static_cast<std::size_t>(std::max(1, resolve_workers(workers))));

    std::vector<std::exception_ptr> errors(chunks);
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
            const std::size_t begin = c * kChunkSize;
            const std::size_t end = std::min(n, begin + kChunkSize);
            try {
                fn(c, begin, end);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads - 1);
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(body);
        body();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace geohub

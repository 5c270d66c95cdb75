#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace relaysim {

/// Trials per chunk. Chunk boundaries depend only on the trial range, never
/// on the worker count, which keeps reductions bit-identical.
inline constexpr std::uint64_t trial_chunk_size = 4096;

inline std::size_t default_worker_count()
{
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Evaluates `chunk_fn(begin, end)` over [first, first + count) split into
/// fixed-size chunks, on up to `workers` threads. Results come back in
/// chunk order; fold them sequentially for a deterministic reduction.
template <class Result, class ChunkFn>
std::vector<Result> map_trial_chunks(std::uint64_t first, std::uint64_t count, std::size_t workers,
                                     ChunkFn chunk_fn)
{
    const std::uint64_t n_chunks = (count + trial_chunk_size - 1) / trial_chunk_size;
    std::vector<Result> results(n_chunks);
    if (n_chunks == 0) {
        return results;
    }
    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t begin = first + c * trial_chunk_size;
        const std::uint64_t end = std::min(first + count, begin + trial_chunk_size);
        results[c] = chunk_fn(begin, end);
    };

    workers = std::clamp<std::size_t>(workers, 1, static_cast<std::size_t>(n_chunks));
    if (workers == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            run_chunk(c);
        }
        return results;
    }

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t c = next++; c < n_chunks; c = next++) {
                    try {
                        run_chunk(c);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next = n_chunks;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

}  // namespace relaysim

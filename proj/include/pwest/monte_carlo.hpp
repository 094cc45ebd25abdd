#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace pwest {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of replicate `index` under base seed `base`. Depends only on the pair,
/// so serial and threaded drivers see the same streams.
constexpr std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(mix64(base) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Pairwise sum in a fixed tree shape determined only by the length.
double tree_sum(std::span<const double> values) noexcept;

struct MeanStats {
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance
    double se = 0.0;        // standard error of the mean
};

MeanStats summarize(std::span<const double> values);

/// Evaluates fn(i) for i in [0, count) on `threads` workers and returns the
/// results indexed by i. Output does not depend on the thread count.
template <class Result, class Fn>
std::vector<Result> run_indexed(std::size_t count, unsigned threads, Fn&& fn) {
    std::vector<Result> out(count);
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

unsigned default_threads() noexcept;

}  // namespace pwest

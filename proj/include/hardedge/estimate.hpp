#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "hardedge/rng.hpp"

namespace hardedge {

/// Result of a Monte Carlo average. stderr is the sample standard
/// deviation divided by sqrt(n_samples).
struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Summation with a fixed pairwise tree so the result does not depend on
/// how the values were produced (thread count, scheduling).
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 64) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline MonteCarloEstimate summarize(std::span<const double> values,
                                    std::uint64_t seed) {
    MonteCarloEstimate est;
    est.n_samples = values.size();
    est.seed = seed;
    if (values.empty()) return est;
    est.mean = pairwise_sum(values) / static_cast<double>(values.size());
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - est.mean;
            sq[i] = d * d;
        }
        const double var =
            pairwise_sum(sq) / static_cast<double>(values.size() - 1);
        est.stderr_mean = std::sqrt(var / static_cast<double>(values.size()));
    }
    return est;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Runs body(first, last) over a blocked partition of [0, n). The body must
/// write only to per-index slots; the partition carries no RNG state, so
/// results are identical for every thread count.
inline void parallel_blocks(
    std::size_t n, unsigned threads,
    const std::function<void(std::size_t, std::size_t)>& body) {
    const unsigned t = resolve_threads(threads);
    if (t <= 1 || n < 2) {
        body(0, n);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(t, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t first = static_cast<std::size_t>(w) * chunk;
        const std::size_t last = std::min(n, first + chunk);
        if (first >= last) break;
        pool.emplace_back([&body, first, last] { body(first, last); });
    }
    for (auto& th : pool) th.join();
}

/// Monte Carlo map-reduce: fills values[k] = sample(stream.substream(k), k)
/// in parallel, reduces with a fixed pairwise tree.
inline MonteCarloEstimate monte_carlo(
    std::size_t n_samples, RngStream stream, unsigned threads,
    const std::function<double(RngStream, std::size_t)>& sample) {
    std::vector<double> values(n_samples);
    parallel_blocks(n_samples, threads,
                    [&](std::size_t first, std::size_t last) {
                        for (std::size_t k = first; k < last; ++k) {
                            values[k] = sample(stream.substream(k), k);
                        }
                    });
    return summarize(values, stream.seed);
}

}  // namespace hardedge

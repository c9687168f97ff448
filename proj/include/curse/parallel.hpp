// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace curse {

// Worker cap for Monte Carlo loops. Results never depend on it.
struct ExecConfig {
    unsigned threads = 0;  // 0: hardware concurrency

    unsigned resolved() const noexcept {
        if (threads != 0) return threads;
        return std::max(1u, std::thread::hardware_concurrency());
    }
};

// Samples per substream; fixed so that the work split never depends on the
// thread count.
inline constexpr std::size_t kChunkSamples = 4096;

inline std::size_t chunk_count(std::size_t samples) noexcept {
    return (samples + kChunkSamples - 1) / kChunkSamples;
}

/*!
 * Evaluate fn(chunk) for chunk = 0..n_chunks-1 on up to exec.resolved()
 * threads and return the results indexed by chunk. The first exception thrown
 * by any worker is rethrown on the caller.
 */
template <class Result, class Fn>
std::vector<Result> map_chunks(std::size_t n_chunks, const ExecConfig& exec, Fn&& fn) {
    std::vector<Result> out(n_chunks);
    const std::size_t workers = std::min<std::size_t>(exec.resolved(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) out[c] = fn(c);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                out[c] = fn(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n_chunks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

// Welford accumulator with Chan's merge.
struct RunningStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) noexcept {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const RunningStats& other) noexcept {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double n_a = static_cast<double>(count);
        const double n_b = static_cast<double>(other.count);
        const double n = n_a + n_b;
        const double delta = other.mean - mean;
        mean += delta * (n_b / n);
        m2 += other.m2 + delta * delta * (n_a * n_b / n);
        count += other.count;
    }

    double sample_variance() const noexcept {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }

    // Normal-approximation 95% half-width of the mean.
    double half_width_95() const noexcept {
        return count > 0 ? 1.96 * std::sqrt(sample_variance() / static_cast<double>(count)) : 0.0;
    }
};

// Pairwise tree merge in index order; deterministic for a fixed input vector.
inline RunningStats merge_pairwise(std::vector<RunningStats> parts) {
    if (parts.empty()) return {};
    for (std::size_t stride = 1; stride < parts.size(); stride *= 2) {
        for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) {
            parts[i].merge(parts[i + stride]);
        }
    }
    return parts.front();
}

}  // namespace curse

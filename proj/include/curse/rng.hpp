// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace curse {

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * A stream is identified by (seed, stream index); the block counter walks
 * through the stream. Two 64-bit outputs are produced per block, so any
 * (seed, stream) pair yields an independent, reproducible sequence with no
 * shared state between streams.
 */
class Philox {
  public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (used_ == 2) {
            buffer_ = bijection({static_cast<std::uint32_t>(counter_),
                                 static_cast<std::uint32_t>(counter_ >> 32),
                                 static_cast<std::uint32_t>(stream_),
                                 static_cast<std::uint32_t>(stream_ >> 32)},
                                key_);
            ++counter_;
            used_ = 0;
        }
        const auto lo = buffer_[2 * used_];
        const auto hi = buffer_[2 * used_ + 1];
        ++used_;
        return (static_cast<std::uint64_t>(hi) << 32) | lo;
    }

    // The keyed 10-round Philox bijection on a single 128-bit counter block.
    static Block bijection(Block ctr, Key key) noexcept {
        constexpr std::uint32_t m0 = 0xD2511F53u;
        constexpr std::uint32_t m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u;
        constexpr std::uint32_t w1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += w0;
            key[1] += w1;
        }
        return ctr;
    }

  private:
    Key key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    Block buffer_{};
    int used_ = 2;
};

//---------------------------------------------------------------------------//
/*!
 * Variate generation on top of Philox.
 *
 * Distributions are written out here rather than taken from <random> so that
 * sample streams are bit-identical across standard library implementations.
 */
class Sampler {
  public:
    Sampler(std::uint64_t seed, std::uint64_t stream) noexcept : engine_(seed, stream) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on the open interval (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal (Marsaglia polar method, spare value cached).
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    // Gamma(shape, 1) by Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) noexcept {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform_open(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double exponential() noexcept { return -std::log(uniform_open()); }

    // Random sign, +1 or -1.
    double sign() noexcept { return (engine_() >> 63) ? -1.0 : 1.0; }

    // Uniform point in the Euclidean ball of the given radius centered at 0.
    void ball(std::span<double> out, double radius) noexcept {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& v : out) {
                v = normal();
                norm2 += v * v;
            }
        } while (norm2 == 0.0);
        const double dim = static_cast<double>(out.size());
        const double scale = radius * std::pow(uniform_open(), 1.0 / dim) / std::sqrt(norm2);
        for (auto& v : out) v *= scale;
    }

    // Flat Dirichlet(1, ..., 1) weights.
    void simplex(std::span<double> out) noexcept {
        double total = 0.0;
        for (auto& w : out) {
            w = exponential();
            total += w;
        }
        for (auto& w : out) w /= total;
    }

    Philox& engine() noexcept { return engine_; }

  private:
    Philox engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace curse

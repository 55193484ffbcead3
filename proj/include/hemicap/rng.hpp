// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hemicap {

// Seed derivation. Every random quantity in the library is drawn from a
// stream whose seed is a pure function of (base_seed, trial_index, tag), so
// results are independent of evaluation order and thread count.
//
// The mixer is splitmix64 (Steele, Lea, Flood 2014), the customary finalizer
// for spreading structured seed material across 64 bits.

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden64;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ (kGolden64 * (salt + 1)));
}

enum class StreamTag : std::uint64_t {
    Codebook = 1,
    ActiveSet = 2,
    Noise = 3,
    WendelMC = 4,
    Delta = 5,
};

inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t trial_index,
                                 StreamTag tag) {
    return mix_seed(mix_seed(base_seed, trial_index), static_cast<std::uint64_t>(tag));
}

// A deterministic random stream: mt19937_64 (whose output sequence the C++
// standard pins down exactly) plus hand-rolled uniform and Gaussian draws.
// The distribution adaptors in <random> are implementation-defined, so using
// them would break bit-reproducibility across standard libraries.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) by rejection; unbiased for any bound.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // Standard normal via the Marsaglia polar method (sqrt/log only, no trig).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace hemicap

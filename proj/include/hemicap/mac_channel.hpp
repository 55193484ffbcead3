// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors
//
// System model: shared spherical codebook of M_n = round(n^d) codewords of
// radius sqrt(nP), K_a = max(1, round(beta n)) active users, unit-variance
// Gaussian noise. Codebooks are pure functions of (params, seed) with one
// derived substream per codeword index, so construction order and worker
// count cannot change a single bit.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hemicap/num.hpp"
#include "hemicap/rng.hpp"
#include "hemicap/sphere_geometry.hpp"

namespace hemicap {

enum class SamplingMode { FullSphere, HemisphereConditioned };

inline std::pair<long long, long long> derive_sizes(int n, double d, double beta) {
    if (n < 2) throw std::invalid_argument("derive_sizes: n must be >= 2");
    if (!(d > 2.0)) throw std::invalid_argument("derive_sizes: d must exceed 2");
    if (!(beta > 0.0)) throw std::invalid_argument("derive_sizes: beta must be positive");
    const double m_real = std::pow(static_cast<double>(n), d);
    if (!(m_real < 4.6e18)) throw std::invalid_argument("derive_sizes: M_n overflows 64-bit range");
    const long long m_n = std::llround(m_real);
    const long long k_a = std::max(1LL, std::llround(beta * n));
    if (k_a > m_n) throw std::invalid_argument("derive_sizes: K_a exceeds M_n");
    return {m_n, k_a};
}

struct ChannelParams {
    int n = 2;
    double d = 2.5;
    double beta = 0.2;
    double P = 1.0;
    SamplingMode mode = SamplingMode::FullSphere;
    std::vector<double> axis;  // unit vector, required in HemisphereConditioned mode

    long long M() const { return derive_sizes(n, d, beta).first; }
    long long K_a() const { return derive_sizes(n, d, beta).second; }
    double radius() const { return std::sqrt(static_cast<double>(n) * P); }
    // Necessary-condition flag from the sum-rate argument; informational only.
    bool reliable_decoding_feasible() const { return beta < 0.25; }

    void validate() const {
        derive_sizes(n, d, beta);
        if (!(P > 0.0)) throw std::invalid_argument("ChannelParams: P must be positive");
        if (mode == SamplingMode::HemisphereConditioned) {
            if (static_cast<int>(axis.size()) != n)
                throw std::invalid_argument("ChannelParams: conditioned mode needs an n-dimensional axis");
            check_unit_axis(axis);
        }
    }
};

// Regenerates codeword m from its private substream. In conditioned mode the
// indices designated active (sorted list) are drawn on the closed hemisphere
// about the configured axis; everything else is uniform on the full sphere.
inline void generate_codeword(const ChannelParams& params, std::uint64_t codebook_seed,
                              long long m, std::span<const long long> active_sorted,
                              std::span<double> out) {
    RandomStream rng(mix_seed(codebook_seed, static_cast<std::uint64_t>(m)));
    const bool conditioned =
        params.mode == SamplingMode::HemisphereConditioned &&
        std::binary_search(active_sorted.begin(), active_sorted.end(), m);
    if (conditioned)
        fill_hemisphere(out, params.radius(), params.axis, rng);
    else
        fill_uniform_sphere(out, params.radius(), rng);
}

struct Codebook {
    ChannelParams params;
    std::uint64_t seed = 0;
    std::vector<long long> active_designated;  // empty in FullSphere mode
    std::vector<double> data;                  // M x n, row-major

    long long size() const { return static_cast<long long>(data.size()) / params.n; }
    std::span<const double> codeword(long long m) const {
        return {data.data() + static_cast<std::size_t>(m) * params.n,
                static_cast<std::size_t>(params.n)};
    }
};

inline Codebook build_codebook(const ChannelParams& params, std::uint64_t seed,
                               std::span<const long long> active = {}) {
    params.validate();
    if (params.mode == SamplingMode::HemisphereConditioned &&
        static_cast<long long>(active.size()) != params.K_a())
        throw std::invalid_argument("build_codebook: conditioned mode needs the K_a active indices");
    Codebook cb;
    cb.params = params;
    cb.seed = seed;
    cb.active_designated.assign(active.begin(), active.end());
    std::sort(cb.active_designated.begin(), cb.active_designated.end());
    const long long m_n = params.M();
    cb.data.resize(static_cast<std::size_t>(m_n) * params.n);
    for (long long m = 0; m < m_n; ++m)
        generate_codeword(params, seed, m, cb.active_designated,
                          {cb.data.data() + static_cast<std::size_t>(m) * params.n,
                           static_cast<std::size_t>(params.n)});
    return cb;
}

enum class ActiveSetMode { DistinctSubset, IidMessages };

struct ActiveSetDraw {
    std::vector<long long> indices;  // sorted ascending, deduplicated
    bool collision = false;          // IidMessages only: a repeat occurred
};

inline ActiveSetDraw draw_active_set(const ChannelParams& params, RandomStream& rng,
                                     ActiveSetMode mode = ActiveSetMode::DistinctSubset) {
    params.validate();
    const long long m_n = params.M();
    const long long k_a = params.K_a();
    ActiveSetDraw draw;
    if (mode == ActiveSetMode::DistinctSubset) {
        // Floyd's sampling: a uniform K_a-subset of [0, M) in K_a draws.
        for (long long j = m_n - k_a; j < m_n; ++j) {
            const long long t =
                static_cast<long long>(rng.uniform_below(static_cast<std::uint64_t>(j) + 1));
            const auto it = std::lower_bound(draw.indices.begin(), draw.indices.end(), t);
            if (it != draw.indices.end() && *it == t)
                draw.indices.insert(std::lower_bound(draw.indices.begin(), draw.indices.end(), j), j);
            else
                draw.indices.insert(it, t);
        }
    } else {
        for (long long k = 0; k < k_a; ++k)
            draw.indices.push_back(static_cast<long long>(rng.uniform_below(static_cast<std::uint64_t>(m_n))));
        std::sort(draw.indices.begin(), draw.indices.end());
        const auto last = std::unique(draw.indices.begin(), draw.indices.end());
        draw.collision = last != draw.indices.end();
        draw.indices.erase(last, draw.indices.end());
    }
    return draw;
}

struct Observation {
    std::vector<double> y;
    std::vector<long long> active_set;         // sorted, distinct
    std::optional<std::vector<double>> axis;   // present iff HemisphereConditioned
    std::uint64_t noise_seed = 0;
};

namespace detail {

inline void add_noise(std::span<double> y, std::uint64_t noise_seed, bool zero_noise) {
    if (zero_noise) return;
    RandomStream rng(noise_seed);
    for (double& v : y) v += rng.gaussian();
}

inline void check_active(std::span<const long long> active, long long m_n) {
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (active[i] < 0 || active[i] >= m_n)
            throw std::invalid_argument("transmit: active index out of range");
        if (i > 0 && active[i] <= active[i - 1])
            throw std::invalid_argument("transmit: active set must be sorted and distinct");
    }
}

}  // namespace detail

// y = sum_{m in S} x_m + Z with Z ~ N(0, I_n) regenerated from noise_seed.
// The zero-noise variant exists for diagnostics only.
inline Observation transmit(const Codebook& cb, std::span<const long long> active,
                            std::uint64_t noise_seed, bool zero_noise = false) {
    detail::check_active(active, cb.size());
    Observation obs;
    obs.y.assign(static_cast<std::size_t>(cb.params.n), 0.0);
    obs.active_set.assign(active.begin(), active.end());
    obs.noise_seed = noise_seed;
    if (cb.params.mode == SamplingMode::HemisphereConditioned) obs.axis = cb.params.axis;
    for (long long m : active) {
        const auto x = cb.codeword(m);
        for (int i = 0; i < cb.params.n; ++i) obs.y[static_cast<std::size_t>(i)] += x[i];
    }
    detail::add_noise(obs.y, noise_seed, zero_noise);
    return obs;
}

// Same observation as transmit(build_codebook(...), ...) but regenerating
// only the active codewords, for runs that never touch the inactive ones.
inline Observation transmit_streamed(const ChannelParams& params, std::uint64_t codebook_seed,
                                     std::span<const long long> active, std::uint64_t noise_seed,
                                     bool zero_noise = false) {
    params.validate();
    detail::check_active(active, params.M());
    Observation obs;
    obs.y.assign(static_cast<std::size_t>(params.n), 0.0);
    obs.active_set.assign(active.begin(), active.end());
    obs.noise_seed = noise_seed;
    if (params.mode == SamplingMode::HemisphereConditioned) obs.axis = params.axis;
    std::vector<double> cw(static_cast<std::size_t>(params.n));
    for (long long m : active) {
        generate_codeword(params, codebook_seed, m, active, cw);
        for (int i = 0; i < params.n; ++i) obs.y[static_cast<std::size_t>(i)] += cw[static_cast<std::size_t>(i)];
    }
    detail::add_noise(obs.y, noise_seed, zero_noise);
    return obs;
}

struct CollisionBound {
    double pairs_over_m = 0.0;  // C(K_a, 2) / M_n
    double loose = 0.0;         // beta^2 n^2 / (2 n^d)
};

inline CollisionBound collision_bound(const ChannelParams& params) {
    params.validate();
    const long long k_a = params.K_a();
    CollisionBound b;
    b.pairs_over_m = 0.5 * static_cast<double>(k_a) * static_cast<double>(k_a - 1) /
                     static_cast<double>(params.M());
    b.loose = params.beta * params.beta * static_cast<double>(params.n) * static_cast<double>(params.n) /
              (2.0 * std::pow(static_cast<double>(params.n), params.d));
    return b;
}

}  // namespace hemicap

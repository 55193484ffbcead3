// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors

#include <algorithm>
#include <cmath>
#include <vector>

#include <catch_amalgamated.hpp>

#include "hemicap/geo_decoder.hpp"
#include "hemicap/mac_channel.hpp"

using namespace hemicap;

namespace {

// Hand-built codebook with a chosen number of rows; params carry (n, d, beta)
// only for K_a and the radius, the ML stage never consults params.M().
Codebook tiny_codebook(int n, long long rows, std::uint64_t seed, double P = 1.0) {
    Codebook cb;
    cb.params.n = n;
    cb.params.d = 2.1;
    cb.params.beta = 2.0 / 16.0;  // K_a = 2 at n = 16
    cb.params.P = P;
    cb.seed = seed;
    cb.data.resize(static_cast<std::size_t>(rows) * n);
    RandomStream rng(seed);
    for (long long m = 0; m < rows; ++m)
        fill_uniform_sphere({cb.data.data() + static_cast<std::size_t>(m) * n,
                             static_cast<std::size_t>(n)},
                            cb.params.radius(), rng);
    return cb;
}

std::vector<long long> all_rows(const Codebook& cb) {
    std::vector<long long> idx(static_cast<std::size_t>(cb.size()));
    for (long long j = 0; j < cb.size(); ++j) idx[static_cast<std::size_t>(j)] = j;
    return idx;
}

// From-scratch reference: minimize over every pair, recomputing each residual
// independently, keeping the lexicographically first argmin.
std::pair<std::vector<long long>, double> brute_force_pairs(std::span<const double> y,
                                                            const Codebook& cb,
                                                            std::span<const long long> retained) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<long long> best_set;
    for (std::size_t a = 0; a < retained.size(); ++a) {
        for (std::size_t b = a + 1; b < retained.size(); ++b) {
            std::vector<double> r(y.begin(), y.end());
            const auto xa = cb.codeword(retained[a]);
            const auto xb = cb.codeword(retained[b]);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= xa[i] + xb[i];
            const double v = norm_sq(r);
            if (v < best) {
                best = v;
                best_set = {retained[a], retained[b]};
            }
        }
    }
    return {best_set, best};
}

}  // namespace

TEST_CASE("cap threshold schedules") {
    REQUIRE(tau_value(TauSchedule::zero(), 100) == 0.0);
    REQUIRE(tau_value(TauSchedule::power_law(0.25), 16) == Catch::Approx(-0.5).margin(1e-15));
    REQUIRE(tau_value(TauSchedule::log_growth(1.0), 100) ==
            Catch::Approx(-std::log(100.0) / 10.0).margin(1e-15));
    // The cap cannot widen past the full sphere.
    REQUIRE(tau_value(TauSchedule::log_growth(10.0), 4) == -1.0);
    // tau_n -> 0 from below as n grows.
    double prev = tau_value(TauSchedule::power_law(0.25), 10);
    for (int n : {100, 1000, 10000}) {
        const double t = tau_value(TauSchedule::power_law(0.25), n);
        REQUIRE(t > prev);
        REQUIRE(t < 0.0);
        prev = t;
    }
    REQUIRE_THROWS_AS(TauSchedule::power_law(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(TauSchedule::power_law(0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(TauSchedule::log_growth(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(tau_value(TauSchedule::zero(), 1), std::invalid_argument);
}

TEST_CASE("direction estimate normalizes and rejects the zero observation") {
    const std::vector<double> y{3.0, 0.0, 4.0};
    const std::vector<double> u = direction_estimate(y);
    REQUIRE(u[0] == Catch::Approx(0.6).margin(1e-15));
    REQUIRE(u[2] == Catch::Approx(0.8).margin(1e-15));
    const std::vector<double> zero(3, 0.0);
    try {
        direction_estimate(zero);
        FAIL("expected decode_error");
    } catch (const decode_error& e) {
        REQUIRE(e.code() == decode_error::Code::DegenerateObservation);
    }
}

TEST_CASE("cap pre-filter: nesting, complement counts, and full-sphere cap") {
    const Codebook cb = tiny_codebook(16, 64, 21);
    RandomStream rng(3);
    std::vector<double> u(16);
    fill_uniform_sphere(u, 1.0, rng);

    const CapFilter tight = prefilter(cb, u, 0.0);
    const CapFilter wide = prefilter(cb, u, -0.3);
    const CapFilter all = prefilter(cb, u, -1.0);
    REQUIRE(all.retained.size() == 64);
    REQUIRE(wide.retained.size() >= tight.retained.size());
    REQUIRE(std::includes(wide.retained.begin(), wide.retained.end(), tight.retained.begin(),
                          tight.retained.end()));
    REQUIRE(std::is_sorted(tight.retained.begin(), tight.retained.end()));
    for (std::size_t i = 0; i < tight.retained.size(); ++i)
        REQUIRE(tight.scores[i] >= 0.0);
    REQUIRE(tight.retained_true_count == -1);

    const std::vector<long long> truth{5, 9, 11};
    const CapFilter counted = prefilter(cb, u, -0.2, truth);
    long long manual_true = 0;
    for (long long j : counted.retained)
        if (j == 5 || j == 9 || j == 11) ++manual_true;
    REQUIRE(counted.retained_true_count == manual_true);
    REQUIRE(counted.retained_other_count + counted.retained_true_count ==
            static_cast<long long>(counted.retained.size()));

    REQUIRE_THROWS_AS(prefilter(cb, u, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(prefilter(cb, std::vector<double>(7, 0.0), 0.0), std::invalid_argument);
}

TEST_CASE("exact ML equals the from-scratch reference on random instances") {
    const Codebook cb = tiny_codebook(16, 32, 77);
    const std::vector<long long> retained = all_rows(cb);
    RandomStream rng(1234);
    for (int inst = 0; inst < 50; ++inst) {
        const long long a = static_cast<long long>(rng.uniform_below(32));
        long long b = static_cast<long long>(rng.uniform_below(31));
        if (b >= a) ++b;
        std::vector<double> y(16);
        for (int i = 0; i < 16; ++i)
            y[static_cast<std::size_t>(i)] =
                cb.codeword(a)[i] + cb.codeword(b)[i] + rng.gaussian();
        const DecodeOutcome got = ml_decode_exact(y, cb, retained, 2);
        const auto [want_set, want_res] = brute_force_pairs(y, cb, retained);
        CAPTURE(inst, a, b);
        REQUIRE(got.estimated_set == want_set);
        REQUIRE(got.residual_norm_sq == Catch::Approx(want_res).margin(1e-9));
        REQUIRE(got.method == DecodeMethod::ExactEnumeration);
    }
}

TEST_CASE("exact ML breaks ties toward the lexicographically smallest subset") {
    Codebook cb = tiny_codebook(16, 8, 99);
    // Row 5 duplicates row 0, so {0, 3} and {3, 5} have identical residuals.
    for (int i = 0; i < 16; ++i)
        cb.data[5 * 16 + static_cast<std::size_t>(i)] = cb.data[static_cast<std::size_t>(i)];
    std::vector<double> y(16);
    for (int i = 0; i < 16; ++i)
        y[static_cast<std::size_t>(i)] = cb.codeword(0)[i] + cb.codeword(3)[i];
    const DecodeOutcome out = ml_decode_exact(y, cb, all_rows(cb), 2);
    REQUIRE(out.estimated_set == std::vector<long long>{0, 3});
    // y was itself formed by rounded additions, so re-subtracting the pair
    // leaves only accumulated ulps, not an exact zero.
    REQUIRE(out.residual_norm_sq < 1e-24);
}

TEST_CASE("single-user zero-noise decoding is exact with residual zero") {
    ChannelParams p;
    p.n = 10;
    p.d = 3.0;
    p.beta = 0.05;  // K_a = max(1, round(0.5)) = 1
    REQUIRE(p.K_a() == 1);
    const Codebook cb = build_codebook(p, 5);
    const Observation obs = transmit(cb, std::vector<long long>{321}, 0, true);
    const DecodeOutcome out = decode(obs, cb, TauSchedule::zero());
    REQUIRE(out.estimated_set == std::vector<long long>{321});
    REQUIRE(out.residual_norm_sq == 0.0);
    REQUIRE(out.misses == 0);
    REQUIRE(out.filter.retained_true_count == 1);
}

TEST_CASE("enumeration refuses only past the cap and reports the typed code") {
    const Codebook cb = tiny_codebook(16, 32, 50);
    const std::vector<long long> retained = all_rows(cb);
    std::vector<double> y(16, 0.1);
    REQUIRE_NOTHROW(ml_decode_exact(y, cb, retained, 2, 496));  // C(32,2) = 496
    try {
        ml_decode_exact(y, cb, retained, 2, 495);
        FAIL("expected decode_error");
    } catch (const decode_error& e) {
        REQUIRE(e.code() == decode_error::Code::EnumerationCapExceeded);
    }
}

TEST_CASE("cap underflow surfaces as a typed decode error") {
    Codebook cb = tiny_codebook(4, 6, 60);
    // Every codeword at +radius*e1; the observation points the other way.
    for (long long m = 0; m < 6; ++m)
        for (int i = 0; i < 4; ++i)
            cb.data[static_cast<std::size_t>(m) * 4 + static_cast<std::size_t>(i)] =
                (i == 0 ? 2.0 : 0.0);
    cb.params.beta = 0.5;  // K_a = 2 at n = 4
    Observation obs;
    obs.y = {-1.0, 0.0, 0.0, 0.0};  // u_hat = -e1, every score = -1 < 0
    obs.active_set = {0, 1};
    try {
        decode(obs, cb, TauSchedule::zero());
        FAIL("expected decode_error");
    } catch (const decode_error& e) {
        REQUIRE(e.code() == decode_error::Code::CapUnderflow);
    }
}

TEST_CASE("local search matches exact ML on most easy instances and never beats it") {
    const Codebook cb = tiny_codebook(16, 32, 31);
    const std::vector<long long> retained = all_rows(cb);
    RandomStream rng(777);
    int agree = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const long long a = static_cast<long long>(rng.uniform_below(32));
        long long b = static_cast<long long>(rng.uniform_below(31));
        if (b >= a) ++b;
        std::vector<double> y(16);
        for (int i = 0; i < 16; ++i)
            y[static_cast<std::size_t>(i)] =
                cb.codeword(a)[i] + cb.codeword(b)[i] + 0.5 * rng.gaussian();
        const DecodeOutcome exact = ml_decode_exact(y, cb, retained, 2);
        const DecodeOutcome local = ml_decode_local(y, cb, retained, 2);
        REQUIRE(local.method == DecodeMethod::LocalSearch);
        REQUIRE(local.residual_norm_sq >= exact.residual_norm_sq - 1e-9);
        REQUIRE(std::is_sorted(local.estimated_set.begin(), local.estimated_set.end()));
        if (local.estimated_set == exact.estimated_set) ++agree;
    }
    REQUIRE(agree >= 80);
}

TEST_CASE("full pipeline dispatches strategies and counts misses") {
    ChannelParams p;
    p.n = 10;
    p.d = 3.0;
    p.beta = 0.2;  // M = 1000, K_a = 2
    const Codebook cb = build_codebook(p, 8);
    const std::vector<long long> active{100, 600};
    const Observation obs = transmit(cb, active, 2024);

    const DecodeOutcome exact = decode(obs, cb, TauSchedule::zero());
    REQUIRE(exact.estimated_set.size() == 2);
    REQUIRE(exact.filter.retained_true_count + exact.filter.retained_other_count ==
            exact.filter.retained_count);
    REQUIRE(exact.misses >= 0);
    REQUIRE(exact.misses <= 2);

    // Forcing a tiny enumeration budget falls back to local search.
    const DecodeOutcome fallback =
        decode(obs, cb, TauSchedule::zero(), DecodeStrategy::ExactIfFeasible, 3);
    REQUIRE(fallback.method == DecodeMethod::LocalSearch);
    const DecodeOutcome local = decode(obs, cb, TauSchedule::zero(), DecodeStrategy::LocalOnly);
    REQUIRE(local.method == DecodeMethod::LocalSearch);
    REQUIRE(local.estimated_set == fallback.estimated_set);

    // A wider cap never removes candidates, so the exact residual cannot rise.
    const DecodeOutcome wide =
        decode(obs, cb, TauSchedule::power_law(0.25), DecodeStrategy::ExactIfFeasible, 2'000'000);
    REQUIRE(wide.filter.retained_count >= exact.filter.retained_count);
    REQUIRE(wide.residual_norm_sq <= exact.residual_norm_sq + 1e-9);
}

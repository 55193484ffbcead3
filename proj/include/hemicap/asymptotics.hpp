// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors
//
// Closed-form limits and bounds for the shared-codebook many-access channel:
// the alignment constant c, retention and pre-filter error limits, signal
// component limits, the pairwise Q/Chernoff bounds, the E_l error-term
// ladder, the P/4 exponent, and the sum-rate feasibility predicate.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>

#include "hemicap/mac_channel.hpp"
#include "hemicap/num.hpp"
#include "hemicap/rng.hpp"
#include "hemicap/sphere_geometry.hpp"

namespace hemicap {

// c = sqrt(2 beta / (2 beta + pi)), the limit of <u, u_hat>.
inline double alignment_limit(double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("alignment_limit: beta must be >= 0");
    return std::sqrt(2.0 * beta / (2.0 * beta + kPi));
}

// Retention limit at tau = 0: 1/2 + arcsin(c)/pi, and its complement, the
// pre-filter per-user error limit 1/2 - arcsin(c)/pi.
inline std::pair<double, double> retention_limit_at_zero(double beta) {
    const double c = alignment_limit(beta);
    const double retention = 0.5 + std::asin(c) / kPi;
    return {retention, 1.0 - retention};
}

// (parallel, perp_sq, output_norm) limits: S_par/n -> beta sqrt(2P/pi),
// ||S_perp||^2/n^2 -> P beta, ||Y||/n -> sqrt(2 P beta^2/pi + P beta).
inline std::tuple<double, double, double> component_limits(double beta, double P) {
    if (!(beta > 0.0) || !(P > 0.0))
        throw std::invalid_argument("component_limits: beta and P must be positive");
    const double parallel = beta * std::sqrt(2.0 * P / kPi);
    const double perp_sq = P * beta;
    const double output_norm = std::sqrt(2.0 * P * beta * beta / kPi + P * beta);
    return {parallel, perp_sq, output_norm};
}

// Pairwise confusion of two K_a-subsets differing by Delta: exact tail
// Q(||Delta||/2) through erfc, plus the Chernoff form exp(-||Delta||^2/8).
// Computing the tail independently of the bound keeps the dominance check
// q <= chernoff informative rather than circular.
inline std::pair<double, double> pairwise_error(double delta_norm_sq) {
    if (!(delta_norm_sq >= 0.0)) throw std::invalid_argument("pairwise_error: need ||Delta||^2 >= 0");
    const double q = normal_upper_tail(std::sqrt(delta_norm_sq) / 2.0);
    const double chernoff = std::exp(-delta_norm_sq / 8.0);
    return {q, chernoff};
}

// Monte Carlo check of ||Delta_{l,n}||^2/n -> 2 l P: draws l + l independent
// uniform codewords of radius sqrt(nP), forms the signed difference of the
// two group sums, and averages ||Delta||^2/n over the trials.
inline double delta_concentration_check(int n, double P, int l, long long trials,
                                        std::uint64_t seed) {
    if (l < 1) throw std::invalid_argument("delta_concentration_check: l must be >= 1");
    if (trials < 1) throw std::invalid_argument("delta_concentration_check: trials must be >= 1");
    const double radius = std::sqrt(n * P);
    std::vector<double> cw(static_cast<std::size_t>(n));
    std::vector<double> delta(static_cast<std::size_t>(n));
    KahanSum mean;
    for (long long t = 0; t < trials; ++t) {
        RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(t), StreamTag::Delta));
        std::fill(delta.begin(), delta.end(), 0.0);
        for (int k = 0; k < 2 * l; ++k) {
            fill_uniform_sphere(cw, radius, rng);
            const double sign = (k < l) ? 1.0 : -1.0;
            for (int i = 0; i < n; ++i) delta[static_cast<std::size_t>(i)] += sign * cw[static_cast<std::size_t>(i)];
        }
        mean.add(norm_sq(delta) / static_cast<double>(n));
    }
    return mean.value() / static_cast<double>(trials);
}

// log E_l = log C(K_a - 1, l - 1) + log C(round((M_n - K_a)/2), l) - l n P / 4.
// The o(n) correction in the exponent is set to zero: the source only
// constrains it to vanish per symbol, and every consumer of this value works
// at the exponent scale.
inline double error_term_log(int n, double d, double beta, double P, int l) {
    const auto [m_n, k_a] = derive_sizes(n, d, beta);
    if (l < 1 || l > k_a) throw std::invalid_argument("error_term_log: l must lie in [1, K_a]");
    const long long half = std::llround(static_cast<double>(m_n - k_a) / 2.0);
    return log_choose(k_a - 1, l - 1) + log_choose(half, l) -
           static_cast<double>(l) * n * P / 4.0;
}

// Thm-level ML error exponent: lim -(1/n) log PUPE_ML = P/4.
inline double ml_error_exponent(double P) {
    if (!(P > 0.0)) throw std::invalid_argument("ml_error_exponent: P must be positive");
    return P / 4.0;
}

struct SumRateFeasibility {
    double r_sum = 0.0;  // beta d log n   (nats per symbol)
    double c_sum = 0.0;  // (1/2) log(1 + n beta P)
    bool feasible = false;
};

inline SumRateFeasibility sum_rate_feasibility(int n, double d, double beta, double P) {
    if (n < 2 || !(d > 2.0) || !(beta > 0.0) || !(P > 0.0))
        throw std::invalid_argument("sum_rate_feasibility: invalid parameters");
    SumRateFeasibility f;
    f.r_sum = beta * d * std::log(static_cast<double>(n));
    f.c_sum = 0.5 * std::log(1.0 + static_cast<double>(n) * beta * P);
    f.feasible = f.r_sum <= f.c_sum;
    return f;
}

// Bundle of the closed forms most runs want next to their estimators.
struct LimitReport {
    double c = 0.0;
    double retention_at_zero = 0.0;
    double pupe_prefilter_at_zero = 0.0;
    double parallel_limit = 0.0;
    double perp_sq_limit = 0.0;
    double output_norm_limit = 0.0;
    double ml_exponent = 0.0;  // P/4
};

inline LimitReport make_limit_report(double beta, double P) {
    LimitReport r;
    r.c = alignment_limit(beta);
    std::tie(r.retention_at_zero, r.pupe_prefilter_at_zero) = retention_limit_at_zero(beta);
    const auto [par, perp, onorm] = component_limits(beta, P);
    r.parallel_limit = par;
    r.perp_sq_limit = perp;
    r.output_norm_limit = onorm;
    r.ml_exponent = ml_error_exponent(P);
    return r;
}

}  // namespace hemicap

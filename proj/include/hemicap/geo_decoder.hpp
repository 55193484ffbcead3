// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors
//
// Two-stage decoder: direction estimate u_hat = Y/||Y||, cap pre-filter
// {j : <s_j, u_hat> >= tau_n}, then maximum-likelihood subset selection over
// the retained candidates, either by exhaustive enumeration (lexicographic
// tie-break) or by greedy + 1-swap local search.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemicap/mac_channel.hpp"
#include "hemicap/num.hpp"

namespace hemicap {

struct TauSchedule {
    enum class Kind { Zero, PowerLaw, LogGrowth };
    Kind kind = Kind::PowerLaw;
    double param = 0.25;

    static TauSchedule zero() { return {Kind::Zero, 0.0}; }
    static TauSchedule power_law(double gamma) {
        if (!(gamma > 0.0 && gamma < 0.5))
            throw std::invalid_argument("TauSchedule: PowerLaw gamma must lie in (0, 1/2)");
        return {Kind::PowerLaw, gamma};
    }
    static TauSchedule log_growth(double scale) {
        if (!(scale > 0.0)) throw std::invalid_argument("TauSchedule: LogGrowth scale must be positive");
        return {Kind::LogGrowth, scale};
    }
};

// tau_n = -a_n/sqrt(n) with a_n = 0, n^gamma, or scale*log(n); clamped at -1
// (a cap reaching the whole sphere cannot widen further).
inline double tau_value(const TauSchedule& schedule, int n) {
    if (n < 2) throw std::invalid_argument("tau_value: n must be >= 2");
    double tau = 0.0;
    switch (schedule.kind) {
        case TauSchedule::Kind::Zero: tau = 0.0; break;
        case TauSchedule::Kind::PowerLaw: tau = -std::pow(static_cast<double>(n), schedule.param - 0.5); break;
        case TauSchedule::Kind::LogGrowth:
            tau = -schedule.param * std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
            break;
    }
    return std::max(tau, -1.0);
}

class decode_error : public std::runtime_error {
  public:
    enum class Code { DegenerateObservation, CapUnderflow, EnumerationCapExceeded };
    decode_error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

  private:
    Code code_;
};

inline std::vector<double> direction_estimate(std::span<const double> y) {
    const double yn = norm(y);
    if (!(yn > 0.0))
        throw decode_error(decode_error::Code::DegenerateObservation,
                           "direction_estimate: degenerate observation with ||y|| = 0");
    std::vector<double> u(y.begin(), y.end());
    for (double& v : u) v /= yn;
    return u;
}

struct CapFilter {
    std::vector<double> u_hat;
    double tau = 0.0;
    std::vector<long long> retained;  // ascending
    std::vector<double> scores;       // <s_j, u_hat> for each retained j
    long long retained_true_count = -1;   // -1 until ground truth is supplied
    long long retained_other_count = -1;
};

struct CapFilterSummary {
    double tau = 0.0;
    long long retained_count = 0;
    long long retained_true_count = -1;
    long long retained_other_count = -1;
};

// Retains exactly { j : <x_j, u_hat>/sqrt(nP) >= tau }; the comparison is the
// definition, so no tolerance is involved.
inline CapFilter prefilter(const Codebook& cb, std::span<const double> u_hat, double tau,
                           std::span<const long long> ground_truth = {}) {
    if (static_cast<int>(u_hat.size()) != cb.params.n)
        throw std::invalid_argument("prefilter: direction dimension mismatch");
    if (!(tau >= -1.0 && tau <= 0.0)) throw std::invalid_argument("prefilter: tau must lie in [-1, 0]");
    CapFilter f;
    f.u_hat.assign(u_hat.begin(), u_hat.end());
    f.tau = tau;
    const double inv_radius = 1.0 / cb.params.radius();
    const long long m_n = cb.size();
    for (long long j = 0; j < m_n; ++j) {
        const double score = dot(cb.codeword(j), u_hat) * inv_radius;
        if (score >= tau) {
            f.retained.push_back(j);
            f.scores.push_back(score);
        }
    }
    if (!ground_truth.empty()) {
        long long truth = 0;
        for (long long j : f.retained)
            if (std::binary_search(ground_truth.begin(), ground_truth.end(), j)) ++truth;
        f.retained_true_count = truth;
        f.retained_other_count = static_cast<long long>(f.retained.size()) - truth;
    }
    return f;
}

enum class DecodeMethod { ExactEnumeration, LocalSearch };

struct DecodeOutcome {
    std::vector<long long> estimated_set;  // sorted, |estimated_set| = K_a
    int misses = -1;                       // |S \ S_hat| when ground truth known
    double residual_norm_sq = 0.0;
    DecodeMethod method = DecodeMethod::ExactEnumeration;
    CapFilterSummary filter;
};

namespace detail {

inline double residual_norm_sq(std::span<const double> y, const Codebook& cb,
                               std::span<const long long> subset) {
    std::vector<double> r(y.begin(), y.end());
    for (long long j : subset) {
        const auto x = cb.codeword(j);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= x[i];
    }
    return norm_sq(r);
}

inline void require_no_underflow(long long retained, long long k_a) {
    if (retained < k_a)
        throw decode_error(decode_error::Code::CapUnderflow,
                           "cap underflow: retained set smaller than K_a");
}

}  // namespace detail

// Exhaustive minimization of ||y - sum_{i in S'} x_i||^2 over K_a-subsets of
// the retained indices, visited in lexicographic order with strict-improvement
// updates, so ties resolve to the lexicographically smallest subset. Partial
// residuals are carried down the combination tree; the winner's residual is
// recomputed from scratch before returning.
inline DecodeOutcome ml_decode_exact(std::span<const double> y, const Codebook& cb,
                                     std::span<const long long> retained, long long k_a,
                                     long long enumeration_cap = 2'000'000) {
    const long long r_count = static_cast<long long>(retained.size());
    detail::require_no_underflow(r_count, k_a);
    if (choose_capped(r_count, k_a, enumeration_cap) > enumeration_cap)
        throw decode_error(decode_error::Code::EnumerationCapExceeded,
                           "exact enumeration refused: C(|retained|, K_a) exceeds the cap; "
                           "use ml_decode_local");
    const int n = cb.params.n;
    const int k = static_cast<int>(k_a);
    const double npower = static_cast<double>(n) * cb.params.P;

    std::vector<std::vector<double>> level(static_cast<std::size_t>(k));
    std::vector<double> level_sq(static_cast<std::size_t>(k), 0.0);
    std::vector<int> pos(static_cast<std::size_t>(k), 0);
    std::vector<int> best_pos;
    double best = std::numeric_limits<double>::infinity();

    // Depth c chooses pos[c] with level[c] = y - sum of the first c picks.
    level[0].assign(y.begin(), y.end());
    level_sq[0] = norm_sq(level[0]);
    int depth = 0;
    pos[0] = -1;
    while (depth >= 0) {
        ++pos[static_cast<std::size_t>(depth)];
        const int p = pos[static_cast<std::size_t>(depth)];
        if (p > static_cast<int>(r_count) - (k - depth)) {
            --depth;
            continue;
        }
        const auto x = cb.codeword(retained[static_cast<std::size_t>(p)]);
        const auto& r = level[static_cast<std::size_t>(depth)];
        if (depth == k - 1) {
            const double score = level_sq[static_cast<std::size_t>(depth)] - 2.0 * dot(r, x) + npower;
            if (score < best) {
                best = score;
                best_pos.assign(pos.begin(), pos.end());
            }
        } else {
            auto& next = level[static_cast<std::size_t>(depth) + 1];
            next.resize(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) next[i] = r[i] - x[i];
            level_sq[static_cast<std::size_t>(depth) + 1] = norm_sq(next);
            ++depth;
            pos[static_cast<std::size_t>(depth)] = p;
        }
    }

    DecodeOutcome out;
    out.method = DecodeMethod::ExactEnumeration;
    for (int c = 0; c < k; ++c)
        out.estimated_set.push_back(retained[static_cast<std::size_t>(best_pos[static_cast<std::size_t>(c)])]);
    out.residual_norm_sq = detail::residual_norm_sq(y, cb, out.estimated_set);
    return out;
}

// Greedy initialization (K_a picks, each maximizing the residual decrease)
// followed by first-improvement 1-swap descent in ascending index order.
// Every accepted swap recomputes the true residual, so the descent is
// monotone and cannot cycle.
inline DecodeOutcome ml_decode_local(std::span<const double> y, const Codebook& cb,
                                     std::span<const long long> retained, long long k_a,
                                     long long max_rounds = -1) {
    const long long r_count = static_cast<long long>(retained.size());
    detail::require_no_underflow(r_count, k_a);
    if (max_rounds < 0) max_rounds = 50 * k_a;
    const int n = cb.params.n;
    const double npower = static_cast<double>(n) * cb.params.P;

    std::vector<bool> chosen(static_cast<std::size_t>(r_count), false);
    std::vector<int> selected;
    std::vector<double> r(y.begin(), y.end());
    for (long long step = 0; step < k_a; ++step) {
        int best_p = -1;
        double best_dot = -std::numeric_limits<double>::infinity();
        for (int p = 0; p < static_cast<int>(r_count); ++p) {
            if (chosen[static_cast<std::size_t>(p)]) continue;
            const double d = dot(r, cb.codeword(retained[static_cast<std::size_t>(p)]));
            if (d > best_dot) {
                best_dot = d;
                best_p = p;
            }
        }
        chosen[static_cast<std::size_t>(best_p)] = true;
        selected.push_back(best_p);
        const auto x = cb.codeword(retained[static_cast<std::size_t>(best_p)]);
        for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] -= x[i];
    }
    std::sort(selected.begin(), selected.end());
    double current = norm_sq(r);

    long long rounds = 0;
    bool improved = true;
    while (improved && rounds < max_rounds) {
        improved = false;
        for (std::size_t si = 0; si < selected.size() && !improved; ++si) {
            const int p_out = selected[si];
            const auto x_out = cb.codeword(retained[static_cast<std::size_t>(p_out)]);
            const double r_dot_out = dot(r, x_out);
            for (int p_in = 0; p_in < static_cast<int>(r_count) && !improved; ++p_in) {
                if (chosen[static_cast<std::size_t>(p_in)]) continue;
                const auto x_in = cb.codeword(retained[static_cast<std::size_t>(p_in)]);
                const double predicted = current + 2.0 * (r_dot_out - dot(r, x_in)) +
                                         2.0 * (npower - dot(x_out, x_in));
                if (!(predicted < current)) continue;
                std::vector<double> r_next(r);
                for (int i = 0; i < n; ++i)
                    r_next[static_cast<std::size_t>(i)] += x_out[i] - x_in[i];
                const double actual = norm_sq(r_next);
                if (!(actual < current)) continue;
                chosen[static_cast<std::size_t>(p_out)] = false;
                chosen[static_cast<std::size_t>(p_in)] = true;
                selected[si] = p_in;
                std::sort(selected.begin(), selected.end());
                r = std::move(r_next);
                current = actual;
                ++rounds;
                improved = true;
            }
        }
    }

    DecodeOutcome out;
    out.method = DecodeMethod::LocalSearch;
    for (int p : selected) out.estimated_set.push_back(retained[static_cast<std::size_t>(p)]);
    std::sort(out.estimated_set.begin(), out.estimated_set.end());
    out.residual_norm_sq = detail::residual_norm_sq(y, cb, out.estimated_set);
    return out;
}

enum class DecodeStrategy { ExactIfFeasible, LocalOnly };

// Full pipeline: u_hat -> tau_n -> cap filter -> ML stage. Misses are counted
// against the observation's ground-truth active set.
inline DecodeOutcome decode(const Observation& obs, const Codebook& cb,
                            const TauSchedule& schedule,
                            DecodeStrategy strategy = DecodeStrategy::ExactIfFeasible,
                            long long enumeration_cap = 2'000'000) {
    const std::vector<double> u_hat = direction_estimate(obs.y);
    const double tau = tau_value(schedule, cb.params.n);
    const CapFilter filter = prefilter(cb, u_hat, tau, obs.active_set);
    const long long k_a = cb.params.K_a();
    detail::require_no_underflow(static_cast<long long>(filter.retained.size()), k_a);

    DecodeOutcome out;
    const bool exact_feasible =
        strategy == DecodeStrategy::ExactIfFeasible &&
        choose_capped(static_cast<long long>(filter.retained.size()), k_a, enumeration_cap) <=
            enumeration_cap;
    if (exact_feasible)
        out = ml_decode_exact(obs.y, cb, filter.retained, k_a, enumeration_cap);
    else
        out = ml_decode_local(obs.y, cb, filter.retained, k_a);

    out.filter.tau = tau;
    out.filter.retained_count = static_cast<long long>(filter.retained.size());
    out.filter.retained_true_count = filter.retained_true_count;
    out.filter.retained_other_count = filter.retained_other_count;
    long long hits = 0;
    for (long long j : out.estimated_set)
        if (std::binary_search(obs.active_set.begin(), obs.active_set.end(), j)) ++hits;
    out.misses = static_cast<int>(static_cast<long long>(obs.active_set.size()) - hits);
    return out;
}

}  // namespace hemicap

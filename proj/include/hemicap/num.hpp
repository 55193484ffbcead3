// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace hemicap {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

// Compensated (Kahan) accumulator. Used where a long sum of small terms must
// not depend on clever compiler reassociation for its accuracy.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// log C(n, k) via lgamma; -inf outside the triangle.
inline double log_choose(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

inline double log_sum_exp(std::span<const double> terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (double t : terms) m = std::max(m, t);
    if (!std::isfinite(m)) return m;
    KahanSum s;
    for (double t : terms) s.add(std::exp(t - m));
    return m + std::log(s.value());
}

// Upper tail of the standard normal, Q(x) = P[N(0,1) >= x].
inline double normal_upper_tail(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

// C(n, k) capped at `cap`: returns min(C(n,k), cap+1) without overflow, so a
// caller can test feasibility of enumerating C(n,k) subsets.
inline long long choose_capped(long long n, long long k, long long cap) {
    if (k < 0 || n < 0) throw std::invalid_argument("choose_capped: negative argument");
    if (k > n) return 0;
    k = std::min(k, n - k);
    long double c = 1.0L;
    for (long long i = 1; i <= k; ++i) {
        c *= static_cast<long double>(n - k + i);
        c /= static_cast<long double>(i);
        if (c > static_cast<long double>(cap) + 1.0L) return cap + 1;
    }
    return static_cast<long long>(c + 0.5L);
}

}  // namespace hemicap

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors
//
// Geometry on the sphere S^{n-1}(radius): uniform and hemisphere-conditioned
// sampling, the open-hemisphere predicate, cap distances, and the density of
// a single coordinate of a uniform unit vector.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hemicap/num.hpp"
#include "hemicap/rng.hpp"

namespace hemicap {

struct SphereVector {
    std::vector<double> coords;
    double radius = 1.0;

    int n() const { return static_cast<int>(coords.size()); }
    // Normalized coordinate s_i = x_i / radius (the unit-sphere view).
    double normalized(int i) const { return coords[static_cast<std::size_t>(i)] / radius; }
};

struct HemisphereWitness {
    bool is_hemispherical = false;
    std::optional<std::vector<double>> axis;  // unit witness direction when found
    double margin = 0.0;                      // min_i <s_i, axis> over the inputs
    bool undecided = false;                   // neither witness nor origin-in-hull certificate
};

// Fills `out` with a uniform point of the given radius: Gaussian direction,
// normalized. A vanishing-norm draw is redrawn; eight failures in a row can
// only mean a broken stream, so that is an error.
inline void fill_uniform_sphere(std::span<double> out, double radius, RandomStream& rng) {
    if (out.size() < 2) throw std::invalid_argument("fill_uniform_sphere: n must be >= 2");
    if (!(radius > 0.0)) throw std::invalid_argument("fill_uniform_sphere: radius must be positive");
    for (int attempt = 0; attempt < 8; ++attempt) {
        for (double& v : out) v = rng.gaussian();
        const double g = norm(out);
        if (g > 0.0 && std::isfinite(g)) {
            const double scale = radius / g;
            for (double& v : out) v *= scale;
            return;
        }
    }
    throw std::runtime_error("fill_uniform_sphere: degenerate Gaussian draw persisted after 8 redraws");
}

inline SphereVector sample_uniform_sphere(int n, double radius, RandomStream& rng) {
    if (n < 2) throw std::invalid_argument("sample_uniform_sphere: n must be >= 2");
    SphereVector x;
    x.coords.resize(static_cast<std::size_t>(n));
    x.radius = radius;
    fill_uniform_sphere(x.coords, radius, rng);
    return x;
}

inline void check_unit_axis(std::span<const double> axis) {
    const double an = norm(axis);
    if (std::abs(an - 1.0) > 1e-9) throw std::invalid_argument("axis must have unit norm (±1e-9)");
}

// Uniform draw on the closed hemisphere {<x, axis> >= 0}: sample the full
// sphere and reflect the negative half across the axis hyperplane, which
// preserves the uniform measure. The sign of the recomputed inner product is
// re-verified so the postcondition <x, axis> >= 0 holds exactly, not merely
// up to rounding; a failed verification (possible only when the projection is
// at the scale of machine noise) counts as a degenerate draw and is redrawn.
inline void fill_hemisphere(std::span<double> out, double radius, std::span<const double> axis,
                            RandomStream& rng) {
    if (axis.size() != out.size()) throw std::invalid_argument("fill_hemisphere: axis/point dimension mismatch");
    check_unit_axis(axis);
    for (int attempt = 0; attempt < 8; ++attempt) {
        fill_uniform_sphere(out, radius, rng);
        const double t = dot(out, axis);
        if (t < 0.0) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] -= 2.0 * t * axis[i];
        }
        if (dot(out, axis) >= 0.0) return;
    }
    throw std::runtime_error("fill_hemisphere: reflection failed to certify the sign after 8 redraws");
}

inline SphereVector sample_hemisphere(int n, double radius, std::span<const double> axis,
                                      RandomStream& rng) {
    if (n < 2) throw std::invalid_argument("sample_hemisphere: n must be >= 2");
    if (static_cast<int>(axis.size()) != n) throw std::invalid_argument("sample_hemisphere: axis dimension mismatch");
    SphereVector x;
    x.coords.resize(static_cast<std::size_t>(n));
    x.radius = radius;
    fill_hemisphere(x.coords, radius, axis, rng);
    return x;
}

namespace detail {

// Solves the dense linear system A w = b (m x m, row-major) in place by
// Gaussian elimination with partial pivoting. Returns false on a vanishing
// pivot.
inline bool solve_dense(std::vector<double>& a, std::vector<double>& b, int m) {
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * m + col]) >
                std::abs(a[static_cast<std::size_t>(piv) * m + col]))
                piv = r;
        if (std::abs(a[static_cast<std::size_t>(piv) * m + col]) < 1e-300) return false;
        if (piv != col) {
            for (int c = 0; c < m; ++c)
                std::swap(a[static_cast<std::size_t>(piv) * m + c], a[static_cast<std::size_t>(col) * m + c]);
            std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
        }
        const double dpc = a[static_cast<std::size_t>(col) * m + col];
        for (int r = col + 1; r < m; ++r) {
            const double f = a[static_cast<std::size_t>(r) * m + col] / dpc;
            if (f == 0.0) continue;
            for (int c = col; c < m; ++c)
                a[static_cast<std::size_t>(r) * m + c] -= f * a[static_cast<std::size_t>(col) * m + c];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    for (int r = m - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < m; ++c) s -= a[static_cast<std::size_t>(r) * m + c] * b[static_cast<std::size_t>(c)];
        b[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r) * m + r];
    }
    return true;
}

// Affine least-squares subproblem of the min-norm solver: weights alpha
// (free sign, summing to one) minimizing ||sum_k alpha_k q_k||^2 over the
// corral. KKT system with a tiny diagonal ridge so duplicated or antipodal
// points do not make the Gram matrix exactly singular.
inline bool affine_min_norm(const std::vector<double>& pts, int n, const std::vector<int>& corral,
                            std::vector<double>& alpha) {
    const int m = static_cast<int>(corral.size());
    const int dim = m + 1;
    for (double ridge : {1e-14, 1e-10}) {
        std::vector<double> a(static_cast<std::size_t>(dim) * dim, 0.0);
        std::vector<double> b(static_cast<std::size_t>(dim), 0.0);
        for (int r = 0; r < m; ++r) {
            const double* pr = pts.data() + static_cast<std::size_t>(corral[static_cast<std::size_t>(r)]) * n;
            for (int c = r; c < m; ++c) {
                const double* pc = pts.data() + static_cast<std::size_t>(corral[static_cast<std::size_t>(c)]) * n;
                double g = 0.0;
                for (int i = 0; i < n; ++i) g += pr[i] * pc[i];
                a[static_cast<std::size_t>(r) * dim + c] = g;
                a[static_cast<std::size_t>(c) * dim + r] = g;
            }
            a[static_cast<std::size_t>(r) * dim + r] += ridge;
            a[static_cast<std::size_t>(r) * dim + m] = 1.0;
            a[static_cast<std::size_t>(m) * dim + r] = 1.0;
        }
        b[static_cast<std::size_t>(m)] = 1.0;
        if (solve_dense(a, b, dim)) {
            alpha.assign(b.begin(), b.begin() + m);
            return true;
        }
    }
    return false;
}

struct MinNormOutcome {
    std::vector<double> point;
    bool converged = false;
};

// Wolfe's minimum-norm-point algorithm over conv{q_0..q_{N-1}} (Wolfe 1976).
// Maintains a corral of affinely independent points and the min-norm point of
// its simplex; each major step inserts the vertex most violating optimality,
// each minor step walks back onto the simplex and drops vanished vertices.
// Terminates either at the optimum (whose norm equals the max-margin value)
// or at an origin-in-hull certificate (norm below inside_tol).
inline MinNormOutcome min_norm_point(const std::vector<double>& pts, int n, int npts,
                                     double inside_tol) {
    MinNormOutcome out;
    std::vector<int> corral = {0};
    std::vector<double> lambda = {1.0};
    std::vector<double> x(pts.begin(), pts.begin() + n);
    std::vector<double> alpha;
    const int max_major = 16 * npts + 64;
    for (int major = 0; major < max_major; ++major) {
        const double xn2 = norm_sq(x);
        if (xn2 <= inside_tol * inside_tol) {
            out.converged = true;
            break;
        }
        int jmin = -1;
        double dmin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < npts; ++j) {
            const double d = dot(x, std::span<const double>(pts.data() + static_cast<std::size_t>(j) * n,
                                                            static_cast<std::size_t>(n)));
            if (d < dmin) {
                dmin = d;
                jmin = j;
            }
        }
        if (dmin >= xn2 - 1e-12 * (1.0 + xn2)) {
            out.converged = true;
            break;
        }
        if (std::find(corral.begin(), corral.end(), jmin) != corral.end()) break;  // numerical stall
        corral.push_back(jmin);
        lambda.push_back(0.0);
        for (int minor = 0; minor <= npts + 1; ++minor) {
            if (!affine_min_norm(pts, n, corral, alpha)) break;
            double amin = alpha[0];
            for (double v : alpha) amin = std::min(amin, v);
            if (amin > -1e-12) {
                for (std::size_t k = 0; k < alpha.size(); ++k) lambda[k] = std::max(alpha[k], 0.0);
                break;
            }
            double theta = 1.0;
            for (std::size_t k = 0; k < alpha.size(); ++k)
                if (alpha[k] < 0.0 && lambda[k] > alpha[k])
                    theta = std::min(theta, lambda[k] / (lambda[k] - alpha[k]));
            std::vector<int> next_corral;
            std::vector<double> next_lambda;
            double worst = std::numeric_limits<double>::infinity();
            std::size_t worst_k = 0;
            for (std::size_t k = 0; k < alpha.size(); ++k) {
                const double lk = (1.0 - theta) * lambda[k] + theta * alpha[k];
                if (lk < worst) {
                    worst = lk;
                    worst_k = k;
                }
                if (lk > 1e-12) {
                    next_corral.push_back(corral[k]);
                    next_lambda.push_back(lk);
                }
            }
            if (next_corral.size() == corral.size()) {  // force progress: drop the smallest weight
                next_corral.erase(next_corral.begin() + static_cast<std::ptrdiff_t>(worst_k));
                next_lambda.erase(next_lambda.begin() + static_cast<std::ptrdiff_t>(worst_k));
            }
            corral = std::move(next_corral);
            lambda = std::move(next_lambda);
            if (corral.empty()) break;
        }
        if (corral.empty()) break;
        double lsum = 0.0;
        for (double v : lambda) lsum += v;
        if (lsum <= 0.0) break;
        for (double& v : lambda) v /= lsum;
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t k = 0; k < corral.size(); ++k) {
            const double* p = pts.data() + static_cast<std::size_t>(corral[k]) * n;
            for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] += lambda[k] * p[i];
        }
    }
    out.point = std::move(x);
    return out;
}

}  // namespace detail

// Open-hemisphere test per Wendel's setting: true iff some unit u has
// <s_i, u> > tol for every input point, equivalently the origin lies outside
// the convex hull of the normalized points. The min-norm point of the hull
// decides both ways: its direction is the max-margin axis (margin equals the
// min-norm value), and a vanishing min-norm value is an explicit convex
// combination of the points reaching the origin. Inputs in the tolerance gap
// between the two certificates come back false with `undecided` set.
inline HemisphereWitness is_hemispherical(std::span<const SphereVector> points, double tol = 1e-9) {
    if (points.empty()) throw std::invalid_argument("is_hemispherical: empty point list");
    if (!(tol > 0.0)) throw std::invalid_argument("is_hemispherical: tol must be positive");
    const int n = points[0].n();
    const double radius = points[0].radius;
    if (n < 2) throw std::invalid_argument("is_hemispherical: points must have n >= 2");
    for (const SphereVector& p : points) {
        if (p.n() != n) throw std::invalid_argument("is_hemispherical: mixed dimensions");
        if (std::abs(p.radius - radius) > 1e-9 * radius)
            throw std::invalid_argument("is_hemispherical: mixed radii");
    }
    const int npts = static_cast<int>(points.size());
    std::vector<double> pts(static_cast<std::size_t>(npts) * n);
    for (int j = 0; j < npts; ++j)
        for (int i = 0; i < n; ++i)
            pts[static_cast<std::size_t>(j) * n + i] = points[static_cast<std::size_t>(j)].normalized(i);

    const double inside_tol = 1e-11;
    const detail::MinNormOutcome mn = detail::min_norm_point(pts, n, npts, inside_tol);

    HemisphereWitness w;
    const double xn = norm(mn.point);
    if (mn.converged && xn <= inside_tol) {
        // Certified: the origin is a convex combination of the points.
        return w;
    }
    if (xn > 0.0) {
        std::vector<double> u(mn.point);
        for (double& v : u) v /= xn;
        double margin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < npts; ++j)
            margin = std::min(margin, dot(u, std::span<const double>(pts.data() + static_cast<std::size_t>(j) * n,
                                                                     static_cast<std::size_t>(n))));
        w.margin = margin;
        if (margin > tol) {
            w.is_hemispherical = true;
            w.axis = std::move(u);
            return w;
        }
    }
    w.undecided = true;
    return w;
}

// Hausdorff distance between the tau-cap {<s, u> >= tau} and the hemisphere
// {<s, u> >= 0}: arccos(tau) - pi/2. Positive tau would shrink the cap below
// a hemisphere, which is outside the model.
inline double cap_hausdorff_distance(double tau) {
    if (!(tau >= -1.0 && tau <= 0.0)) throw std::invalid_argument("cap_hausdorff_distance: tau must lie in [-1, 0]");
    return std::acos(tau) - kPi / 2.0;
}

// Log-density of one coordinate of a uniform point on the unit sphere S^{n-1}:
// (1/sqrt(pi)) * Gamma(n/2)/Gamma((n-1)/2) * (1-t^2)^((n-3)/2) on (-1, 1).
// |t| >= 1 returns -inf for every n (open-support convention; for n = 2 the
// formula would diverge to +inf at the endpoints, for n >= 4 it vanishes, and
// the uniform convention keeps quadrature contracts simple either way).
inline double projection_log_pdf(double t, int n) {
    if (n < 2) throw std::invalid_argument("projection_log_pdf: n must be >= 2");
    if (!(std::abs(t) < 1.0)) return -std::numeric_limits<double>::infinity();
    const double half_n = 0.5 * n;
    return -0.5 * std::log(kPi) + std::lgamma(half_n) - std::lgamma(half_n - 0.5) +
           0.5 * (n - 3) * std::log1p(-t * t);
}

}  // namespace hemicap

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors
//
// Deterministic Monte Carlo experiment harness: per-trial channel/decoder
// pipelines, estimator aggregation, seed management, and statistical
// post-processing. Trials run on any number of worker threads; aggregation is
// a sequential fold in trial-index order, so every report is byte-identical
// regardless of worker count.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <initializer_list>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hemicap/asymptotics.hpp"
#include "hemicap/geo_decoder.hpp"
#include "hemicap/mac_channel.hpp"
#include "hemicap/num.hpp"
#include "hemicap/rng.hpp"
#include "hemicap/sphere_geometry.hpp"
#include "hemicap/wendel.hpp"

namespace hemicap {

enum class Measurement {
    Alignment,
    Retention,
    UnsentRetention,
    CapCardinality,
    Decode,
    WendelMC,
    DeltaConcentration,
};

struct MeasurementSet {
    bool alignment = false;
    bool retention = false;
    bool unsent_retention = false;
    bool cap_cardinality = false;
    bool decode = false;
    bool wendel_mc = false;
    bool delta_concentration = false;

    static MeasurementSet of(std::initializer_list<Measurement> ms) {
        MeasurementSet s;
        for (Measurement m : ms) s.set(m);
        return s;
    }
    void set(Measurement m) {
        switch (m) {
            case Measurement::Alignment: alignment = true; break;
            case Measurement::Retention: retention = true; break;
            case Measurement::UnsentRetention: unsent_retention = true; break;
            case Measurement::CapCardinality: cap_cardinality = true; break;
            case Measurement::Decode: decode = true; break;
            case Measurement::WendelMC: wendel_mc = true; break;
            case Measurement::DeltaConcentration: delta_concentration = true; break;
        }
    }
    // Measurements that require running the channel/decoder pipeline at all.
    bool any_channel() const {
        return alignment || retention || unsent_retention || cap_cardinality || decode;
    }
    // Measurements that require scores for every codeword, not just the sent ones.
    bool needs_unsent_scores() const { return unsent_retention || cap_cardinality; }
};

struct ExperimentConfig {
    ChannelParams params;
    TauSchedule schedule;
    DecodeStrategy strategy = DecodeStrategy::ExactIfFeasible;
    long long trials = 1;
    std::uint64_t base_seed = 0;
    MeasurementSet measurements;
    int threads = 1;               // worker bound; never affects results
    bool fixed_codebook = false;   // one shared codebook instead of one per trial
    bool zero_noise = false;       // diagnostic: omit the additive Gaussian noise
    long long enumeration_cap = 2'000'000;
    bool timing = false;           // record wall-clock runtime_ms per trial

    void validate() const {
        params.validate();
        if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
        if (threads < 1) throw std::invalid_argument("ExperimentConfig: threads must be >= 1");
        if (enumeration_cap < 1)
            throw std::invalid_argument("ExperimentConfig: enumeration_cap must be >= 1");
        if (fixed_codebook && params.mode == SamplingMode::HemisphereConditioned)
            throw std::invalid_argument(
                "ExperimentConfig: fixed_codebook requires full-sphere sampling (a conditioned "
                "codebook depends on the per-trial active set)");
        if (measurements.alignment && params.mode != SamplingMode::HemisphereConditioned) {
            if (static_cast<int>(params.axis.size()) != params.n)
                throw std::invalid_argument(
                    "ExperimentConfig: alignment needs an n-dimensional reference axis");
            check_unit_axis(params.axis);
        }
    }
};

// Counts follow the retained-set split into sent (active) and unsent codewords;
// -1 marks a field whose measurement was not requested.
struct TrialRecord {
    long long trial_index = 0;
    std::optional<double> alignment;  // <axis, u_hat>
    long long sent_retained = -1;
    long long unsent_retained = -1;
    bool cap_underflow = false;
    int misses = -1;
    double runtime_ms = 0.0;
};

namespace detail {

// Runs fn(t) for t in [0, trials) on up to `threads` workers. Work is claimed
// through an atomic counter; results must be written into per-trial slots so
// ordering never matters. The first exception wins and is rethrown here.
template <typename Fn>
inline void parallel_trials(long long trials, int threads, Fn&& fn) {
    const int workers = static_cast<int>(std::min<long long>(std::max(threads, 1), trials));
    if (workers <= 1) {
        for (long long t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const long long t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                fn(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(trials);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Sample mean and stdev/sqrt(T), both via deterministic two-pass Kahan sums.
inline std::pair<double, double> mean_and_stderr(std::span<const double> xs) {
    const auto t_count = static_cast<double>(xs.size());
    KahanSum sum;
    for (double x : xs) sum.add(x);
    const double mean = sum.value() / t_count;
    if (xs.size() < 2) return {mean, 0.0};
    KahanSum sq;
    for (double x : xs) sq.add((x - mean) * (x - mean));
    const double stdev = std::sqrt(sq.value() / (t_count - 1.0));
    return {mean, stdev / std::sqrt(t_count)};
}

}  // namespace detail

// One full channel/decoder pipeline; a pure function of (config, trial_index).
// Per-trial streams come from derive_seed(base_seed, t, tag). A prebuilt
// shared codebook may be passed for fixed_codebook runs; it must equal the one
// this function would otherwise rebuild.
inline TrialRecord run_trial(const ExperimentConfig& config, long long trial_index,
                             const Codebook* shared_codebook = nullptr) {
    const auto t = static_cast<std::uint64_t>(trial_index);
    const ChannelParams& params = config.params;
    const MeasurementSet& m = config.measurements;
    const long long k_a = params.K_a();
    const long long m_n = params.M();
    const int n = params.n;

    TrialRecord rec;
    rec.trial_index = trial_index;
    const auto t0 = std::chrono::steady_clock::now();

    const std::uint64_t codebook_seed =
        derive_seed(config.base_seed, config.fixed_codebook ? 0 : t, StreamTag::Codebook);
    RandomStream active_rng(derive_seed(config.base_seed, t, StreamTag::ActiveSet));
    const std::vector<long long> active = draw_active_set(params, active_rng).indices;
    const std::uint64_t noise_seed = derive_seed(config.base_seed, t, StreamTag::Noise);

    Codebook local_codebook;
    const Codebook* cb = nullptr;
    std::vector<double> active_rows;  // K_a x n when no full codebook is built
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    if (m.decode) {
        if (shared_codebook != nullptr) {
            cb = shared_codebook;
        } else {
            local_codebook = build_codebook(params, codebook_seed, active);
            cb = &local_codebook;
        }
        for (long long j : active) {
            const auto x = cb->codeword(j);
            for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += x[i];
        }
    } else {
        // Materialize only the sent codewords; unsent ones stream on demand.
        active_rows.resize(static_cast<std::size_t>(k_a) * static_cast<std::size_t>(n));
        for (long long k = 0; k < k_a; ++k) {
            std::span<double> row{active_rows.data() + static_cast<std::size_t>(k) * n,
                                  static_cast<std::size_t>(n)};
            generate_codeword(params, codebook_seed, active[static_cast<std::size_t>(k)], active,
                              row);
            for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)];
        }
    }
    detail::add_noise(y, noise_seed, config.zero_noise);

    const std::vector<double> u_hat = direction_estimate(y);
    if (m.alignment) rec.alignment = dot(params.axis, u_hat);

    const double tau = tau_value(config.schedule, n);
    const double inv_radius = 1.0 / params.radius();
    if (m.decode) {
        const CapFilter filter = prefilter(*cb, u_hat, tau, active);
        rec.sent_retained = filter.retained_true_count;
        rec.unsent_retained = filter.retained_other_count;
        rec.cap_underflow = static_cast<long long>(filter.retained.size()) < k_a;
        if (rec.cap_underflow) {
            // The decoder cannot emit a K_a-subset, so every sent message is a miss.
            rec.misses = static_cast<int>(k_a);
        } else {
            const bool exact =
                config.strategy == DecodeStrategy::ExactIfFeasible &&
                choose_capped(static_cast<long long>(filter.retained.size()), k_a,
                              config.enumeration_cap) <= config.enumeration_cap;
            const DecodeOutcome out =
                exact ? ml_decode_exact(y, *cb, filter.retained, k_a, config.enumeration_cap)
                      : ml_decode_local(y, *cb, filter.retained, k_a);
            long long hits = 0;
            for (long long j : out.estimated_set)
                if (std::binary_search(active.begin(), active.end(), j)) ++hits;
            rec.misses = static_cast<int>(k_a - hits);
        }
    } else {
        if (m.retention || m.unsent_retention || m.cap_cardinality) {
            long long sent = 0;
            for (long long k = 0; k < k_a; ++k) {
                std::span<const double> row{active_rows.data() + static_cast<std::size_t>(k) * n,
                                            static_cast<std::size_t>(n)};
                if (dot(row, u_hat) * inv_radius >= tau) ++sent;
            }
            rec.sent_retained = sent;
        }
        if (m.needs_unsent_scores()) {
            long long unsent = 0;
            std::vector<double> cw(static_cast<std::size_t>(n));
            for (long long j = 0; j < m_n; ++j) {
                if (std::binary_search(active.begin(), active.end(), j)) continue;
                generate_codeword(params, codebook_seed, j, active, cw);
                if (dot(cw, u_hat) * inv_radius >= tau) ++unsent;
            }
            rec.unsent_retained = unsent;
            rec.cap_underflow = rec.sent_retained + unsent < k_a;
        }
    }

    if (config.timing) {
        const auto t1 = std::chrono::steady_clock::now();
        rec.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    return rec;
}

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<TrialRecord> trials;

    std::optional<double> alignment_mean, alignment_stderr;
    std::optional<double> p_ret_hat, p_ret_stderr;
    std::optional<double> pupe_p_hat;       // 1 - p_ret_hat exactly
    std::optional<double> p_n_hat, p_n_stderr;  // pooled unsent retention
    std::optional<double> cap_underflow_rate;
    std::optional<double> pupe_ml_hat, pupe_ml_stderr;
    std::optional<double> pupe_ml_zero_upper95;  // set when no miss was observed

    LimitReport limits;                                // analytic sidecar at (beta, P)
    std::optional<std::pair<double, double>> wendel_mc;  // estimate, stderr at (n, K_a)
    std::optional<double> delta_mean;                    // mean ||Delta_{1,n}||^2 / n

    std::string to_text() const;
};

// Fraction of `trials` draws of N uniform points on the unit sphere in R^n
// that fit in a closed hemisphere; binomial stderr sqrt(p(1-p)/trials).
inline std::pair<double, double> estimate_wendel_mc(int n, long long N, long long trials,
                                                    std::uint64_t seed, int threads = 1) {
    if (n < 2) throw std::invalid_argument("estimate_wendel_mc: n must be >= 2");
    if (N < 1) throw std::invalid_argument("estimate_wendel_mc: N must be >= 1");
    if (trials < 100) throw std::invalid_argument("estimate_wendel_mc: trials must be >= 100");
    std::vector<unsigned char> hit(static_cast<std::size_t>(trials), 0);
    detail::parallel_trials(trials, threads, [&](long long t) {
        RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(t), StreamTag::WendelMC));
        std::vector<SphereVector> pts;
        pts.reserve(static_cast<std::size_t>(N));
        for (long long k = 0; k < N; ++k) pts.push_back(sample_uniform_sphere(n, 1.0, rng));
        hit[static_cast<std::size_t>(t)] = is_hemispherical(pts).is_hemispherical ? 1 : 0;
    });
    long long count = 0;
    for (unsigned char h : hit) count += h;
    const double p = static_cast<double>(count) / static_cast<double>(trials);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

// Ordinary least-squares slope of ys against xs.
inline double estimate_rate_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("estimate_rate_slope: need >= 3 paired points");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("estimate_rate_slope: xs must be strictly increasing");
    KahanSum sx, sy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx.add(xs[i]);
        sy.add(ys[i]);
    }
    const double xbar = sx.value() / static_cast<double>(xs.size());
    const double ybar = sy.value() / static_cast<double>(xs.size());
    KahanSum sxy, sxx;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy.add((xs[i] - xbar) * (ys[i] - ybar));
        sxx.add((xs[i] - xbar) * (xs[i] - xbar));
    }
    return sxy.value() / sxx.value();
}

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport rep;
    rep.config = config;
    rep.limits = make_limit_report(config.params.beta, config.params.P);
    const MeasurementSet& m = config.measurements;
    const long long trials = config.trials;
    const long long k_a = config.params.K_a();
    const long long m_n = config.params.M();

    if (m.any_channel()) {
        std::optional<Codebook> shared;
        if (config.fixed_codebook && m.decode)
            shared = build_codebook(config.params,
                                    derive_seed(config.base_seed, 0, StreamTag::Codebook));
        rep.trials.resize(static_cast<std::size_t>(trials));
        const Codebook* shared_ptr = shared ? &*shared : nullptr;
        detail::parallel_trials(trials, config.threads, [&](long long t) {
            rep.trials[static_cast<std::size_t>(t)] = run_trial(config, t, shared_ptr);
        });

        if (m.alignment) {
            std::vector<double> xs;
            xs.reserve(rep.trials.size());
            for (const TrialRecord& r : rep.trials) xs.push_back(*r.alignment);
            std::tie(rep.alignment_mean, rep.alignment_stderr) = detail::mean_and_stderr(xs);
        }
        if (m.retention || m.decode) {
            std::vector<double> xs;
            xs.reserve(rep.trials.size());
            for (const TrialRecord& r : rep.trials)
                xs.push_back(static_cast<double>(r.sent_retained) / static_cast<double>(k_a));
            const auto [mean, se] = detail::mean_and_stderr(xs);
            rep.p_ret_hat = mean;
            rep.p_ret_stderr = se;
            rep.pupe_p_hat = 1.0 - mean;
        }
        if (m.unsent_retention || m.decode) {
            // Pooled across trials: every unsent codeword contributes a Bernoulli.
            long long kept = 0;
            for (const TrialRecord& r : rep.trials) kept += r.unsent_retained;
            const double pool = static_cast<double>(trials) * static_cast<double>(m_n - k_a);
            const double p = static_cast<double>(kept) / pool;
            rep.p_n_hat = p;
            rep.p_n_stderr = std::sqrt(p * (1.0 - p) / pool);
        }
        if (m.cap_cardinality || m.decode) {
            long long events = 0;
            for (const TrialRecord& r : rep.trials) events += r.cap_underflow ? 1 : 0;
            rep.cap_underflow_rate = static_cast<double>(events) / static_cast<double>(trials);
        }
        if (m.decode) {
            std::vector<double> xs;
            xs.reserve(rep.trials.size());
            long long total_misses = 0;
            for (const TrialRecord& r : rep.trials) {
                xs.push_back(static_cast<double>(r.misses) / static_cast<double>(k_a));
                total_misses += r.misses;
            }
            std::tie(rep.pupe_ml_hat, rep.pupe_ml_stderr) = detail::mean_and_stderr(xs);
            // Zero-inflated tail: with zero observed misses report the exact
            // 95% zero-count upper bound on P(any miss), which dominates
            // E[misses/K_a] because misses/K_a <= 1{misses >= 1}.
            if (total_misses == 0)
                rep.pupe_ml_zero_upper95 =
                    1.0 - std::pow(0.05, 1.0 / static_cast<double>(trials));
        }
    }

    if (m.wendel_mc)
        rep.wendel_mc = estimate_wendel_mc(config.params.n, k_a, trials, config.base_seed,
                                           config.threads);
    if (m.delta_concentration)
        rep.delta_mean =
            delta_concentration_check(config.params.n, config.params.P, 1, trials,
                                      config.base_seed);
    return rep;
}

inline const char* schedule_name(const TauSchedule& s) {
    switch (s.kind) {
        case TauSchedule::Kind::Zero: return "zero";
        case TauSchedule::Kind::PowerLaw: return "power";
        case TauSchedule::Kind::LogGrowth: return "log";
    }
    return "?";
}

inline std::string measurement_names(const MeasurementSet& m) {
    std::string out;
    auto append = [&out](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ',';
        out += name;
    };
    append(m.alignment, "alignment");
    append(m.retention, "retention");
    append(m.unsent_retention, "unsent_retention");
    append(m.cap_cardinality, "cap_cardinality");
    append(m.decode, "decode");
    append(m.wendel_mc, "wendel_mc");
    append(m.delta_concentration, "delta_concentration");
    return out;
}

// Stable structured-text rendering. Worker-count and timing knobs are omitted
// on purpose: they cannot affect results, and the report must be byte-equal
// across thread counts.
inline std::string ExperimentReport::to_text() const {
    using detail::format_double;
    std::string out;
    auto line = [&out](const std::string& key, const std::string& value) {
        out += "  " + key + ": " + value + "\n";
    };
    out += "experiment:\n";
    line("n", std::to_string(config.params.n));
    line("d", format_double(config.params.d));
    line("beta", format_double(config.params.beta));
    line("P", format_double(config.params.P));
    line("M", std::to_string(config.params.M()));
    line("K_a", std::to_string(config.params.K_a()));
    line("mode", config.params.mode == SamplingMode::FullSphere ? "full-sphere"
                                                                : "hemisphere-conditioned");
    std::string sched = schedule_name(config.schedule);
    if (config.schedule.kind != TauSchedule::Kind::Zero)
        sched += ":" + format_double(config.schedule.param);
    line("tau_schedule", sched);
    line("tau", format_double(tau_value(config.schedule, config.params.n)));
    line("strategy", config.strategy == DecodeStrategy::ExactIfFeasible ? "exact-if-feasible"
                                                                        : "local-only");
    line("trials", std::to_string(config.trials));
    line("base_seed", std::to_string(config.base_seed));
    line("measurements", measurement_names(config.measurements));
    line("fixed_codebook", config.fixed_codebook ? "1" : "0");
    line("zero_noise", config.zero_noise ? "1" : "0");
    line("enumeration_cap", std::to_string(config.enumeration_cap));
    out += "estimators:\n";
    auto opt = [&](const char* key, const std::optional<double>& v) {
        if (v) line(key, format_double(*v));
    };
    opt("alignment_mean", alignment_mean);
    opt("alignment_stderr", alignment_stderr);
    opt("p_ret_hat", p_ret_hat);
    opt("p_ret_stderr", p_ret_stderr);
    opt("pupe_p_hat", pupe_p_hat);
    opt("p_n_hat", p_n_hat);
    opt("p_n_stderr", p_n_stderr);
    opt("cap_underflow_rate", cap_underflow_rate);
    opt("pupe_ml_hat", pupe_ml_hat);
    opt("pupe_ml_stderr", pupe_ml_stderr);
    opt("pupe_ml_zero_upper95", pupe_ml_zero_upper95);
    if (wendel_mc) {
        line("wendel_mc_estimate", format_double(wendel_mc->first));
        line("wendel_mc_stderr", format_double(wendel_mc->second));
        line("wendel_exact", format_double(wendel_probability(config.params.n,
                                                              config.params.K_a())));
    }
    if (delta_mean) {
        line("delta_mean_sq_over_n", format_double(*delta_mean));
        line("delta_predicted", format_double(2.0 * config.params.P));
    }
    out += "analytic:\n";
    line("c", format_double(limits.c));
    line("retention_at_zero", format_double(limits.retention_at_zero));
    line("pupe_prefilter_at_zero", format_double(limits.pupe_prefilter_at_zero));
    line("parallel_limit", format_double(limits.parallel_limit));
    line("perp_sq_limit", format_double(limits.perp_sq_limit));
    line("output_norm_limit", format_double(limits.output_norm_limit));
    line("ml_exponent", format_double(limits.ml_exponent));
    return out;
}

// Flat per-trial table. Unmeasured optional fields print as empty cells;
// runtime_ms is 0 unless the config enabled timing.
inline std::string trial_csv(const ExperimentReport& rep) {
    using detail::format_double;
    std::string out =
        "trial_index,alignment,sent_retained,unsent_retained,cap_underflow,misses,runtime_ms\n";
    for (const TrialRecord& r : rep.trials) {
        out += std::to_string(r.trial_index);
        out += ',';
        if (r.alignment) out += format_double(*r.alignment);
        out += ',';
        if (r.sent_retained >= 0) out += std::to_string(r.sent_retained);
        out += ',';
        if (r.unsent_retained >= 0) out += std::to_string(r.unsent_retained);
        out += ',';
        out += r.cap_underflow ? '1' : '0';
        out += ',';
        if (r.misses >= 0) out += std::to_string(r.misses);
        out += ',';
        out += format_double(r.runtime_ms);
        out += '\n';
    }
    return out;
}

}  // namespace hemicap

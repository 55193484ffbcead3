// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <catch_amalgamated.hpp>

#include "hemicap/montecarlo.hpp"

using namespace hemicap;

namespace {

ExperimentConfig conditioned_config(int n, long long trials, std::uint64_t seed) {
    ExperimentConfig c;
    c.params.n = n;
    c.params.d = 2.2;
    c.params.beta = 0.2;
    c.params.P = 1.0;
    c.params.mode = SamplingMode::HemisphereConditioned;
    c.params.axis.assign(static_cast<std::size_t>(n), 0.0);
    c.params.axis[0] = 1.0;
    c.schedule = TauSchedule::zero();
    c.trials = trials;
    c.base_seed = seed;
    c.measurements = MeasurementSet::of({Measurement::Alignment, Measurement::Retention});
    return c;
}

ExperimentConfig decode_config(long long trials, std::uint64_t seed) {
    ExperimentConfig c;
    c.params.n = 10;
    c.params.d = 3.0;  // M = 1000
    c.params.beta = 0.2;
    c.params.P = 1.0;
    c.schedule = TauSchedule::zero();
    c.trials = trials;
    c.base_seed = seed;
    c.measurements = MeasurementSet::of({Measurement::Decode});
    return c;
}

bool identical_records(const TrialRecord& a, const TrialRecord& b) {
    return a.trial_index == b.trial_index && a.alignment == b.alignment &&
           a.sent_retained == b.sent_retained && a.unsent_retained == b.unsent_retained &&
           a.cap_underflow == b.cap_underflow && a.misses == b.misses &&
           a.runtime_ms == b.runtime_ms;
}

}  // namespace

TEST_CASE("trials are pure functions of (config, index)") {
    const ExperimentConfig config = conditioned_config(30, 4, 11);
    for (long long t = 0; t < 4; ++t) {
        const TrialRecord a = run_trial(config, t);
        const TrialRecord b = run_trial(config, t);
        REQUIRE(identical_records(a, b));
        REQUIRE(a.alignment.has_value());
        REQUIRE(a.sent_retained >= 0);
        REQUIRE(a.sent_retained <= config.params.K_a());
        REQUIRE(a.misses == -1);
        REQUIRE(a.runtime_ms == 0.0);
    }
    const TrialRecord t0 = run_trial(config, 0);
    const TrialRecord t1 = run_trial(config, 1);
    REQUIRE(t0.alignment != t1.alignment);
}

TEST_CASE("reports are byte-identical across worker counts") {
    ExperimentConfig config = conditioned_config(30, 20, 321);
    config.measurements =
        MeasurementSet::of({Measurement::Alignment, Measurement::Retention,
                            Measurement::UnsentRetention, Measurement::CapCardinality});
    config.threads = 1;
    const ExperimentReport one = run_experiment(config);
    config.threads = 3;
    const ExperimentReport three = run_experiment(config);
    REQUIRE(one.to_text() == three.to_text());
    REQUIRE(trial_csv(one) == trial_csv(three));

    ExperimentConfig dec = decode_config(10, 77);
    dec.threads = 1;
    const ExperimentReport d1 = run_experiment(dec);
    dec.threads = 4;
    const ExperimentReport d4 = run_experiment(dec);
    REQUIRE(d1.to_text() == d4.to_text());
    REQUIRE(trial_csv(d1) == trial_csv(d4));
}

TEST_CASE("estimators stay in range and complement exactly") {
    ExperimentConfig config = decode_config(25, 5);
    const ExperimentReport rep = run_experiment(config);
    REQUIRE(rep.p_ret_hat.has_value());
    REQUIRE(rep.pupe_p_hat.has_value());
    REQUIRE(*rep.p_ret_hat + *rep.pupe_p_hat == 1.0);
    for (const std::optional<double>& v :
         {rep.p_ret_hat, rep.pupe_p_hat, rep.p_n_hat, rep.cap_underflow_rate, rep.pupe_ml_hat}) {
        REQUIRE(v.has_value());
        REQUIRE(*v >= 0.0);
        REQUIRE(*v <= 1.0);
    }
    for (const TrialRecord& r : rep.trials) {
        REQUIRE(r.sent_retained <= config.params.K_a());
        REQUIRE(r.unsent_retained <= config.params.M() - config.params.K_a());
        REQUIRE(r.misses <= config.params.K_a());
        REQUIRE(r.misses >= 0);
    }
    // The analytic sidecar rides along with every report.
    REQUIRE(rep.limits.ml_exponent == 0.25);
    REQUIRE(rep.limits.c == Catch::Approx(alignment_limit(0.2)).margin(0.0));
}

TEST_CASE("zero-noise single-user decoding never misses") {
    ExperimentConfig config = decode_config(8, 13);
    config.params.beta = 0.05;  // K_a = 1
    config.zero_noise = true;
    const ExperimentReport rep = run_experiment(config);
    REQUIRE(*rep.pupe_ml_hat == 0.0);
    REQUIRE(rep.pupe_ml_zero_upper95.has_value());
    REQUIRE(*rep.pupe_ml_zero_upper95 ==
            Catch::Approx(1.0 - std::pow(0.05, 1.0 / 8.0)).margin(1e-15));
    for (const TrialRecord& r : rep.trials) REQUIRE(r.misses == 0);
}

TEST_CASE("fixed-codebook mode shares the trial-zero codebook") {
    ExperimentConfig config = decode_config(6, 99);
    config.fixed_codebook = true;
    const ExperimentReport rep = run_experiment(config);
    // Manually rerun trial 3 against the explicitly shared codebook.
    const Codebook shared =
        build_codebook(config.params, derive_seed(config.base_seed, 0, StreamTag::Codebook));
    const TrialRecord manual = run_trial(config, 3, &shared);
    REQUIRE(identical_records(manual, rep.trials[3]));
    // And run_trial without the hint rebuilds the same thing.
    const TrialRecord rebuilt = run_trial(config, 3);
    REQUIRE(identical_records(rebuilt, rep.trials[3]));

    ExperimentConfig conditioned = conditioned_config(30, 2, 1);
    conditioned.fixed_codebook = true;
    REQUIRE_THROWS_AS(run_experiment(conditioned), std::invalid_argument);
}

TEST_CASE("stderr shrinks like one over sqrt trials on nested runs") {
    ExperimentConfig small = conditioned_config(100, 40, 2025);
    ExperimentConfig large = conditioned_config(100, 160, 2025);
    const ExperimentReport a = run_experiment(small);
    const ExperimentReport b = run_experiment(large);
    const double ratio = *a.alignment_stderr / *b.alignment_stderr;
    REQUIRE(ratio > 2.0 / 2.5);
    REQUIRE(ratio < 2.0 * 2.5);
    const double ret_ratio = *a.p_ret_stderr / *b.p_ret_stderr;
    REQUIRE(ret_ratio > 2.0 / 2.5);
    REQUIRE(ret_ratio < 2.0 * 2.5);
}

TEST_CASE("hemisphericity Monte Carlo estimator") {
    const auto [p_sure, se_sure] = estimate_wendel_mc(8, 6, 1000, 3);
    REQUIRE(p_sure == 1.0);
    REQUIRE(se_sure == 0.0);

    const auto [p23, se23] = estimate_wendel_mc(2, 3, 20000, 4);
    REQUIRE(std::abs(p23 - 0.75) <= 3.0 * std::sqrt(0.75 * 0.25 / 20000.0));
    REQUIRE(se23 == Catch::Approx(std::sqrt(p23 * (1 - p23) / 20000.0)).margin(1e-12));

    const auto [p35, se35] = estimate_wendel_mc(3, 5, 20000, 5);
    (void)se35;
    REQUIRE(std::abs(p35 - 0.6875) <= 3.0 * std::sqrt(0.6875 * 0.3125 / 20000.0));

    const auto [p46, se46] = estimate_wendel_mc(4, 6, 20000, 6);
    (void)se46;
    REQUIRE(std::abs(p46 - 0.8125) <= 3.0 * std::sqrt(0.8125 * 0.1875 / 20000.0));

    // Thread count cannot change the estimate.
    const auto [s1, e1] = estimate_wendel_mc(2, 3, 5000, 9, 1);
    const auto [s4, e4] = estimate_wendel_mc(2, 3, 5000, 9, 4);
    REQUIRE(s1 == s4);
    REQUIRE(e1 == e4);

    REQUIRE_THROWS_AS(estimate_wendel_mc(2, 3, 99, 1), std::invalid_argument);
}

TEST_CASE("rate-slope regression") {
    const std::vector<double> xs{400.0, 800.0, 1200.0, 1600.0, 2000.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(0.085 * x);
    REQUIRE(estimate_rate_slope(xs, ys) == Catch::Approx(0.085).margin(1e-12));

    std::vector<double> shifted;
    for (double y : ys) shifted.push_back(y + 123.0);
    REQUIRE(estimate_rate_slope(xs, shifted) == Catch::Approx(0.085).margin(1e-12));

    REQUIRE_THROWS_AS(estimate_rate_slope(std::vector<double>{1.0, 2.0},
                                          std::vector<double>{1.0, 2.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(estimate_rate_slope(std::vector<double>{1.0, 2.0, 2.0},
                                          std::vector<double>{1.0, 2.0, 3.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(estimate_rate_slope(std::vector<double>{1.0, 2.0, 3.0},
                                          std::vector<double>{1.0, 2.0}),
                      std::invalid_argument);
}

TEST_CASE("trial CSV columns are exactly the documented seven") {
    ExperimentConfig config = decode_config(3, 8);
    const ExperimentReport rep = run_experiment(config);
    const std::string csv = trial_csv(rep);
    std::stringstream ss(csv);
    std::string line;
    REQUIRE(std::getline(ss, line));
    REQUIRE(line ==
            "trial_index,alignment,sent_retained,unsent_retained,cap_underflow,misses,runtime_ms");
    long long rows = 0;
    while (std::getline(ss, line)) {
        long long commas = 0;
        for (char ch : line) commas += ch == ',' ? 1 : 0;
        REQUIRE(commas == 6);
        REQUIRE(line.substr(0, line.find(',')) == std::to_string(rows));
        // No timing requested: the last cell reads exactly 0.
        REQUIRE(line.substr(line.rfind(',') + 1) == "0");
        ++rows;
    }
    REQUIRE(rows == 3);
    // Alignment was not measured here: its column is empty.
    const std::string row0 = trial_csv(rep).substr(csv.find('\n') + 1);
    const std::size_t first_comma = row0.find(',');
    REQUIRE(row0[first_comma + 1] == ',');
}

TEST_CASE("measurement name round-trip is stable") {
    MeasurementSet ms = MeasurementSet::of(
        {Measurement::Alignment, Measurement::Decode, Measurement::DeltaConcentration});
    REQUIRE(measurement_names(ms) == "alignment,decode,delta_concentration");
    REQUIRE(ms.any_channel());
    MeasurementSet side = MeasurementSet::of({Measurement::WendelMC});
    REQUIRE(!side.any_channel());
}

TEST_CASE("sidecar estimators run at the configured trial count") {
    ExperimentConfig config = decode_config(120, 6);
    config.params.n = 8;
    config.params.d = 2.5;  // M = 181, K_a = 2
    config.measurements = MeasurementSet::of(
        {Measurement::WendelMC, Measurement::DeltaConcentration});
    const ExperimentReport rep = run_experiment(config);
    REQUIRE(rep.trials.empty());
    REQUIRE(rep.wendel_mc.has_value());
    REQUIRE(rep.wendel_mc->first == 1.0);  // K_a = 2 <= n = 8 points always fit
    REQUIRE(rep.delta_mean.has_value());
    REQUIRE(*rep.delta_mean == Catch::Approx(2.0).margin(0.5));
    const std::string text = rep.to_text();
    REQUIRE(text.find("wendel_mc_estimate: 1") != std::string::npos);
    REQUIRE(text.find("delta_predicted: 2") != std::string::npos);
}

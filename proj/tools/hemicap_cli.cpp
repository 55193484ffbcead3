// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 hemicap contributors
//
// Command-line front end: every analysis and experiment as a subcommand.
// All randomness derives from --seed; identical invocations produce
// byte-identical outputs. Exit codes: 0 success, 2 parameter error,
// 3 runtime/decode error.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hemicap/asymptotics.hpp"
#include "hemicap/geo_decoder.hpp"
#include "hemicap/mac_channel.hpp"
#include "hemicap/montecarlo.hpp"
#include "hemicap/wendel.hpp"

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    // Annotated examples carry // comments; accept them.
    return json::parse(in, nullptr, true, true);
}

template <typename T>
void merge_key(const CLI::App* cmd, const std::string& flag, const json& cfg,
               const std::string& key, T& var) {
    // Subcommands share this merge helper but not every flag (e.g. the decoder
    // knobs), so tolerate flags that were never attached.
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    if ((opt == nullptr || opt->count() == 0) && cfg.contains(key)) var = cfg.at(key).get<T>();
}

hemicap::TauSchedule parse_schedule(const std::string& text) {
    if (text == "zero") return hemicap::TauSchedule::zero();
    if (text.rfind("power:", 0) == 0)
        return hemicap::TauSchedule::power_law(std::stod(text.substr(6)));
    if (text.rfind("log:", 0) == 0)
        return hemicap::TauSchedule::log_growth(std::stod(text.substr(4)));
    throw std::invalid_argument("tau-schedule must be zero, power:<gamma>, or log:<s>");
}

hemicap::SamplingMode parse_mode(const std::string& text) {
    if (text == "full") return hemicap::SamplingMode::FullSphere;
    if (text == "conditioned") return hemicap::SamplingMode::HemisphereConditioned;
    throw std::invalid_argument("mode must be full or conditioned");
}

hemicap::DecodeStrategy parse_strategy(const std::string& text) {
    if (text == "exact") return hemicap::DecodeStrategy::ExactIfFeasible;
    if (text == "local") return hemicap::DecodeStrategy::LocalOnly;
    throw std::invalid_argument("strategy must be exact or local");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) items.push_back(item);
    return items;
}

hemicap::MeasurementSet parse_measurements(const std::string& text) {
    hemicap::MeasurementSet ms;
    for (const std::string& name : split_list(text)) {
        if (name == "alignment") ms.alignment = true;
        else if (name == "retention") ms.retention = true;
        else if (name == "unsent_retention") ms.unsent_retention = true;
        else if (name == "cap_cardinality") ms.cap_cardinality = true;
        else if (name == "decode") ms.decode = true;
        else if (name == "wendel_mc") ms.wendel_mc = true;
        else if (name == "delta_concentration") ms.delta_concentration = true;
        else throw std::invalid_argument("unknown measurement: " + name);
    }
    return ms;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const std::string& item : split_list(text)) out.push_back(std::stoi(item));
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    std::fputs(text.c_str(), stdout);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << text;
    }
}

void emit_csv(const std::string& text, const std::string& csv_path) {
    if (csv_path.empty()) return;
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open csv file: " + csv_path);
    out << text;
}

// Shared option block for the experiment-style subcommands.
struct ExperimentCli {
    CLI::App* cmd = nullptr;
    int n = 1000;
    double d = 2.5;
    double beta = 0.2;
    double power = 1.0;
    long long trials = 50;
    unsigned long long seed = 0;
    int threads = 1;
    std::string schedule_text = "zero";
    std::string mode_text = "conditioned";
    std::string strategy_text = "exact";
    long long enum_cap = 2'000'000;
    bool zero_noise = false;
    bool fixed_codebook = false;
    bool timing = false;
    std::string config_path, out_path, csv_path;

    void attach(CLI::App* sub, bool with_decoder) {
        cmd = sub;
        sub->add_option("--n", n, "block length n (>= 2)");
        sub->add_option("--d", d, "codebook exponent, M = round(n^d), d > 2");
        sub->add_option("--beta", beta, "user density, K_a = max(1, round(beta*n))");
        sub->add_option("--P", power, "per-codeword power; radius sqrt(n*P)");
        sub->add_option("--trials", trials, "number of Monte Carlo trials");
        sub->add_option("--seed", seed, "base seed for every random stream");
        sub->add_option("--threads", threads, "worker bound; never changes results");
        sub->add_option("--tau-schedule", schedule_text, "zero | power:<gamma> | log:<s>");
        sub->add_option("--mode", mode_text, "full | conditioned");
        if (with_decoder) {
            sub->add_option("--strategy", strategy_text, "exact | local");
            sub->add_option("--enum-cap", enum_cap, "exact-enumeration budget");
            sub->add_flag("--zero-noise", zero_noise, "diagnostic: omit additive noise");
            sub->add_flag("--fixed-codebook", fixed_codebook, "share one codebook across trials");
        }
        sub->add_flag("--timing", timing, "record per-trial runtime_ms in the CSV");
        sub->add_option("--config", config_path, "JSON config file; flags override");
        sub->add_option("--out", out_path, "also write the text report here");
        sub->add_option("--csv", csv_path, "write the per-trial CSV here");
    }

    hemicap::ExperimentConfig build(hemicap::MeasurementSet measurements) {
        const json cfg = load_config(config_path);
        merge_key(cmd, "--n", cfg, "n", n);
        merge_key(cmd, "--d", cfg, "d", d);
        merge_key(cmd, "--beta", cfg, "beta", beta);
        merge_key(cmd, "--P", cfg, "P", power);
        merge_key(cmd, "--trials", cfg, "trials", trials);
        merge_key(cmd, "--seed", cfg, "seed", seed);
        merge_key(cmd, "--threads", cfg, "threads", threads);
        merge_key(cmd, "--tau-schedule", cfg, "tau_schedule", schedule_text);
        merge_key(cmd, "--mode", cfg, "mode", mode_text);
        merge_key(cmd, "--strategy", cfg, "strategy", strategy_text);
        merge_key(cmd, "--enum-cap", cfg, "enum_cap", enum_cap);
        merge_key(cmd, "--zero-noise", cfg, "zero_noise", zero_noise);
        merge_key(cmd, "--fixed-codebook", cfg, "fixed_codebook", fixed_codebook);
        merge_key(cmd, "--timing", cfg, "timing", timing);
        merge_key(cmd, "--out", cfg, "out", out_path);
        merge_key(cmd, "--csv", cfg, "csv", csv_path);
        if (cmd->count("--seed") == 0 && !cfg.contains("seed"))
            throw std::invalid_argument("--seed is required for stochastic subcommands");

        hemicap::ExperimentConfig config;
        config.params.n = n;
        config.params.d = d;
        config.params.beta = beta;
        config.params.P = power;
        config.params.mode = parse_mode(mode_text);
        if (config.params.mode == hemicap::SamplingMode::HemisphereConditioned ||
            measurements.alignment) {
            config.params.axis.assign(static_cast<std::size_t>(n), 0.0);
            config.params.axis[0] = 1.0;  // reference axis e1
        }
        config.schedule = parse_schedule(schedule_text);
        config.strategy = parse_strategy(strategy_text);
        config.trials = trials;
        config.base_seed = seed;
        config.measurements = measurements;
        config.threads = threads;
        config.fixed_codebook = fixed_codebook;
        config.zero_noise = zero_noise;
        config.enumeration_cap = enum_cap;
        config.timing = timing;
        return config;
    }

    void run(hemicap::MeasurementSet measurements) {
        const hemicap::ExperimentConfig config = build(measurements);
        const hemicap::ExperimentReport report = hemicap::run_experiment(config);
        emit(report.to_text(), out_path);
        emit_csv(hemicap::trial_csv(report), csv_path);
    }
};

struct WendelCli {
    CLI::App* cmd = nullptr;
    int n = 2;
    long long big_n = 3;
    long long trials = 0;
    unsigned long long seed = 0;
    int threads = 1;
    std::string config_path, out_path;

    void attach(CLI::App* sub) {
        cmd = sub;
        sub->add_option("--n", n, "dimension n (>= 2)");
        sub->add_option("--N", big_n, "number of uniform points");
        sub->add_option("--trials", trials, "Monte Carlo trials (0 = exact only)");
        sub->add_option("--seed", seed, "base seed (required when trials > 0)");
        sub->add_option("--threads", threads, "worker bound for the MC part");
        sub->add_option("--config", config_path, "JSON config file; flags override");
        sub->add_option("--out", out_path, "also write the report here");
    }

    void run() {
        const json cfg = load_config(config_path);
        merge_key(cmd, "--n", cfg, "n", n);
        merge_key(cmd, "--N", cfg, "N", big_n);
        merge_key(cmd, "--trials", cfg, "trials", trials);
        merge_key(cmd, "--seed", cfg, "seed", seed);
        merge_key(cmd, "--threads", cfg, "threads", threads);
        merge_key(cmd, "--out", cfg, "out", out_path);

        std::string text = "wendel:\n";
        text += "  n: " + std::to_string(n) + "\n";
        text += "  N: " + std::to_string(big_n) + "\n";
        text += "  exact: " + fmt(hemicap::wendel_probability(n, big_n)) + "\n";
        if (big_n <= 64) {
            const hemicap::WendelFraction f = hemicap::wendel_exact_fraction(n, big_n);
            text += "  fraction: " + std::to_string(f.numerator) + "/" +
                    std::to_string(f.denominator) + "\n";
        }
        if (big_n > n)
            text += "  log_complement: " + fmt(hemicap::wendel_log_complement(n, big_n)) + "\n";
        if (trials > 0) {
            if (cmd->count("--seed") == 0 && !cfg.contains("seed"))
                throw std::invalid_argument("--seed is required when trials > 0");
            const auto [est, se] = hemicap::estimate_wendel_mc(n, big_n, trials, seed, threads);
            text += "  trials: " + std::to_string(trials) + "\n";
            text += "  seed: " + std::to_string(seed) + "\n";
            text += "  mc_estimate: " + fmt(est) + "\n";
            text += "  mc_stderr: " + fmt(se) + "\n";
        }
        emit(text, out_path);
    }
};

struct RegimeCli {
    CLI::App* cmd = nullptr;
    double beta = 1.5;
    std::string config_path, out_path;

    void attach(CLI::App* sub) {
        cmd = sub;
        sub->add_option("--beta", beta, "limit ratio beta = lim N/n");
        sub->add_option("--config", config_path, "JSON config file; flags override");
        sub->add_option("--out", out_path, "also write the report here");
    }

    void run() {
        const json cfg = load_config(config_path);
        merge_key(cmd, "--beta", cfg, "beta", beta);
        merge_key(cmd, "--out", cfg, "out", out_path);
        const hemicap::RegimeClass r = hemicap::classify_regime(beta);
        std::string text = "regime:\n";
        text += "  beta: " + fmt(beta) + "\n";
        text += std::string("  kind: ") + hemicap::regime_name(r.kind) + "\n";
        if (r.rate) {
            text += "  rate: " + fmt6(*r.rate) + "\n";
            text += "  rate_precise: " + fmt(*r.rate) + "\n";
        }
        emit(text, out_path);
    }
};

struct LimitsCli {
    CLI::App* cmd = nullptr;
    double beta = 0.2;
    double power = 1.0;
    std::string config_path, out_path;

    void attach(CLI::App* sub) {
        cmd = sub;
        sub->add_option("--beta", beta, "user density beta");
        sub->add_option("--P", power, "per-codeword power");
        sub->add_option("--config", config_path, "JSON config file; flags override");
        sub->add_option("--out", out_path, "also write the report here");
    }

    void run() {
        const json cfg = load_config(config_path);
        merge_key(cmd, "--beta", cfg, "beta", beta);
        merge_key(cmd, "--P", cfg, "P", power);
        merge_key(cmd, "--out", cfg, "out", out_path);
        const hemicap::LimitReport r = hemicap::make_limit_report(beta, power);
        std::string text = "limits:\n";
        text += "  beta: " + fmt(beta) + "\n";
        text += "  P: " + fmt(power) + "\n";
        text += "  c: " + fmt(r.c) + "\n";
        text += "  retention_at_zero: " + fmt(r.retention_at_zero) + "\n";
        text += "  pupe_prefilter_at_zero: " + fmt(r.pupe_prefilter_at_zero) + "\n";
        text += "  parallel_limit: " + fmt(r.parallel_limit) + "\n";
        text += "  perp_sq_limit: " + fmt(r.perp_sq_limit) + "\n";
        text += "  output_norm_limit: " + fmt(r.output_norm_limit) + "\n";
        text += "  ml_exponent: " + fmt(r.ml_exponent) + "\n";
        emit(text, out_path);
    }
};

struct ExponentCli {
    CLI::App* cmd = nullptr;
    double d = 2.5;
    double beta = 0.1;
    double power = 1.0;
    int l_max = 3;
    std::string n_list_text = "100,1000,10000";
    std::string config_path, out_path;

    void attach(CLI::App* sub) {
        cmd = sub;
        sub->add_option("--d", d, "codebook exponent");
        sub->add_option("--beta", beta, "user density");
        sub->add_option("--P", power, "per-codeword power");
        sub->add_option("--l-max", l_max, "ladder depth (clamped to K_a per n)");
        sub->add_option("--n-list", n_list_text, "comma-separated block lengths");
        sub->add_option("--config", config_path, "JSON config file; flags override");
        sub->add_option("--out", out_path, "also write the table here");
    }

    void run() {
        const json cfg = load_config(config_path);
        merge_key(cmd, "--d", cfg, "d", d);
        merge_key(cmd, "--beta", cfg, "beta", beta);
        merge_key(cmd, "--P", cfg, "P", power);
        merge_key(cmd, "--l-max", cfg, "l_max", l_max);
        merge_key(cmd, "--n-list", cfg, "n_list", n_list_text);
        merge_key(cmd, "--out", cfg, "out", out_path);
        if (l_max < 1) throw std::invalid_argument("--l-max must be >= 1");
        const std::vector<int> ns = parse_int_list(n_list_text);

        std::string text = "exponent:\n";
        text += "  d: " + fmt(d) + "\n";
        text += "  beta: " + fmt(beta) + "\n";
        text += "  P: " + fmt(power) + "\n";
        text += "  ml_exponent_limit: " + fmt(hemicap::ml_error_exponent(power)) + "\n";
        text += "table:\n";
        text += "  n,l,log_error_term,neg_log_over_n,gap_to_limit\n";
        for (int n : ns) {
            const auto [m_n, k_a] = hemicap::derive_sizes(n, d, beta);
            (void)m_n;
            const int depth = static_cast<int>(std::min<long long>(l_max, k_a));
            for (int l = 1; l <= depth; ++l) {
                const double log_term = hemicap::error_term_log(n, d, beta, power, l);
                const double per_n = -log_term / static_cast<double>(n);
                const double gap = hemicap::ml_error_exponent(power) - per_n / static_cast<double>(l);
                text += "  " + std::to_string(n) + "," + std::to_string(l) + "," + fmt(log_term) +
                        "," + fmt(per_n) + "," + fmt(gap) + "\n";
            }
        }
        emit(text, out_path);
    }
};

struct DeltaCli {
    CLI::App* cmd = nullptr;
    int n = 500;
    double power = 1.0;
    int l = 1;
    long long trials = 100;
    unsigned long long seed = 0;
    std::string config_path, out_path;

    void attach(CLI::App* sub) {
        cmd = sub;
        sub->add_option("--n", n, "dimension n");
        sub->add_option("--P", power, "per-codeword power");
        sub->add_option("--l", l, "codewords per side of the difference");
        sub->add_option("--trials", trials, "Monte Carlo samples");
        sub->add_option("--seed", seed, "base seed (required)");
        sub->add_option("--config", config_path, "JSON config file; flags override");
        sub->add_option("--out", out_path, "also write the report here");
    }

    void run() {
        const json cfg = load_config(config_path);
        merge_key(cmd, "--n", cfg, "n", n);
        merge_key(cmd, "--P", cfg, "P", power);
        merge_key(cmd, "--l", cfg, "l", l);
        merge_key(cmd, "--trials", cfg, "trials", trials);
        merge_key(cmd, "--seed", cfg, "seed", seed);
        merge_key(cmd, "--out", cfg, "out", out_path);
        if (cmd->count("--seed") == 0 && !cfg.contains("seed"))
            throw std::invalid_argument("--seed is required for stochastic subcommands");
        const double mean = hemicap::delta_concentration_check(n, power, l, trials, seed);
        std::string text = "delta:\n";
        text += "  n: " + std::to_string(n) + "\n";
        text += "  P: " + fmt(power) + "\n";
        text += "  l: " + std::to_string(l) + "\n";
        text += "  trials: " + std::to_string(trials) + "\n";
        text += "  seed: " + std::to_string(seed) + "\n";
        text += "  mean_sq_over_n: " + fmt(mean) + "\n";
        text += "  predicted: " + fmt(2.0 * l * power) + "\n";
        emit(text, out_path);
    }
};

struct SweepCli {
    ExperimentCli base;
    std::string n_list_text = "100,200,400";
    std::string measure_text = "alignment,retention";

    void attach(CLI::App* sub) {
        base.attach(sub, true);
        sub->add_option("--n-list", n_list_text, "comma-separated block lengths");
        sub->add_option("--measure", measure_text,
                        "comma-separated measurements (alignment,retention,unsent_retention,"
                        "cap_cardinality,decode,wendel_mc,delta_concentration)");
    }

    void run() {
        const json cfg = load_config(base.config_path);
        merge_key(base.cmd, "--n-list", cfg, "n_list", n_list_text);
        merge_key(base.cmd, "--measure", cfg, "measure", measure_text);
        const hemicap::MeasurementSet ms = parse_measurements(measure_text);
        const std::vector<int> ns = parse_int_list(n_list_text);

        hemicap::ExperimentConfig config = base.build(ms);
        std::string text;
        text += "# sweep over n: " + n_list_text + "\n";
        text += "# d: " + fmt(config.params.d) + ", beta: " + fmt(config.params.beta) +
                ", P: " + fmt(config.params.P) + "\n";
        text += "# mode: " +
                std::string(config.params.mode == hemicap::SamplingMode::FullSphere
                                ? "full-sphere"
                                : "hemisphere-conditioned") +
                ", tau_schedule: " + base.schedule_text +
                ", strategy: " + base.strategy_text + "\n";
        text += "# trials: " + std::to_string(config.trials) +
                ", base_seed: " + std::to_string(config.base_seed) +
                ", measurements: " + hemicap::measurement_names(ms) + "\n";
        text +=
            "n,M,K_a,tau,alignment_mean,alignment_stderr,alignment_limit,p_ret_hat,p_ret_stderr,"
            "retention_at_zero,pupe_p_hat,p_n_hat,p_n_stderr,cap_underflow_rate,pupe_ml_hat,"
            "pupe_ml_stderr\n";
        auto cell = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
        for (int n : ns) {
            config.params.n = n;
            if (!config.params.axis.empty()) {
                config.params.axis.assign(static_cast<std::size_t>(n), 0.0);
                config.params.axis[0] = 1.0;
            }
            const hemicap::ExperimentReport rep = hemicap::run_experiment(config);
            text += std::to_string(n) + "," + std::to_string(config.params.M()) + "," +
                    std::to_string(config.params.K_a()) + "," +
                    fmt(hemicap::tau_value(config.schedule, n)) + "," +
                    cell(rep.alignment_mean) + "," + cell(rep.alignment_stderr) + "," +
                    fmt(rep.limits.c) + "," + cell(rep.p_ret_hat) + "," +
                    cell(rep.p_ret_stderr) + "," + fmt(rep.limits.retention_at_zero) + "," +
                    cell(rep.pupe_p_hat) + "," + cell(rep.p_n_hat) + "," +
                    cell(rep.p_n_stderr) + "," + cell(rep.cap_underflow_rate) + "," +
                    cell(rep.pupe_ml_hat) + "," + cell(rep.pupe_ml_stderr) + "\n";
        }
        emit(text, base.out_path);
        emit_csv(text, base.csv_path);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hemicap: many-access channel geometry, Wendel bounds, and decoder experiments"};
    app.require_subcommand(1);

    WendelCli wendel;
    wendel.attach(app.add_subcommand("wendel", "exact hemisphericity probability, optional MC"));
    RegimeCli regime;
    regime.attach(app.add_subcommand("regime", "classify the N/n -> beta hemisphericity regime"));
    LimitsCli limits;
    limits.attach(app.add_subcommand("limits", "closed-form limits for (beta, P)"));
    ExperimentCli align_cmd;
    align_cmd.attach(app.add_subcommand("align", "alignment <axis, u_hat> experiment"), false);
    ExperimentCli retention_cmd;
    retention_cmd.attach(app.add_subcommand("retention", "sent-codeword cap retention experiment"),
                         false);
    ExperimentCli capcount_cmd;
    capcount_cmd.mode_text = "full";
    capcount_cmd.attach(app.add_subcommand("capcount", "cap cardinality and unsent retention"),
                        false);
    ExperimentCli decode_cmd;
    decode_cmd.mode_text = "full";
    decode_cmd.schedule_text = "power:0.25";
    decode_cmd.n = 64;
    decode_cmd.d = 2.1;
    decode_cmd.beta = 0.03125;
    decode_cmd.trials = 100;
    decode_cmd.attach(app.add_subcommand("decode", "full two-stage decoding experiment"), true);
    ExponentCli exponent;
    exponent.attach(app.add_subcommand("exponent", "error-term ladder and P/4 convergence table"));
    DeltaCli delta;
    delta.attach(app.add_subcommand("delta", "codeword-difference concentration check"));
    SweepCli sweep;
    sweep.attach(app.add_subcommand("sweep", "grid over n at fixed beta, d, P"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (wendel.cmd->parsed()) wendel.run();
        else if (regime.cmd->parsed()) regime.run();
        else if (limits.cmd->parsed()) limits.run();
        else if (align_cmd.cmd->parsed())
            align_cmd.run(hemicap::MeasurementSet::of({hemicap::Measurement::Alignment}));
        else if (retention_cmd.cmd->parsed())
            retention_cmd.run(hemicap::MeasurementSet::of({hemicap::Measurement::Retention}));
        else if (capcount_cmd.cmd->parsed())
            capcount_cmd.run(hemicap::MeasurementSet::of({hemicap::Measurement::Retention,
                                                          hemicap::Measurement::UnsentRetention,
                                                          hemicap::Measurement::CapCardinality}));
        else if (decode_cmd.cmd->parsed())
            decode_cmd.run(hemicap::MeasurementSet::of({hemicap::Measurement::Decode}));
        else if (exponent.cmd->parsed()) exponent.run();
        else if (delta.cmd->parsed()) delta.run();
        else if (sweep.base.cmd->parsed()) sweep.run();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return 2;
    } catch (const hemicap::decode_error& e) {
        std::fprintf(stderr, "decode error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

// sft: run sparse Fourier recovery experiments and property checks.
//
//   sft recover --p 16 --d 3 --k 8 --snr 256 --seed 7
//   sft bench --trials 100 --format csv --out runs.csv
//   sft verify --seed 1

#include "sft/errors.hpp"
#include "sft/harness.hpp"
#include "sft/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAudit = 3;
constexpr int kExitThreshold = 4;

struct Options {
    std::int64_t p = 16;
    std::int64_t d = 3;
    std::int64_t k = 8;
    double sigma = 0.0;
    std::optional<double> snr;
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    std::string profile = "desk";
    std::string algo = "main";
    std::string out;
    std::string format = "json";
    std::vector<std::string> overrides;
};

void add_run_flags(CLI::App* cmd, Options& o, bool multi) {
    cmd->add_option("--p", o.p, "Side length of the universe")->capture_default_str();
    cmd->add_option("--d", o.d, "Dimension")->capture_default_str();
    cmd->add_option("--k", o.k, "Sparsity")->capture_default_str();
    cmd->add_option("--sigma", o.sigma, "Std of the frequency-domain noise")->capture_default_str();
    cmd->add_option("--snr", o.snr, "Set sigma so that ||xhat||_inf / mu is about this value");
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    if (multi) cmd->add_option("--trials", o.trials, "Number of seeded trials")->capture_default_str();
    cmd->add_option("--profile", o.profile, "Constant profile")
        ->check(CLI::IsMember({"paper", "desk"}))
        ->capture_default_str();
    cmd->add_option("--algo", o.algo, "Recovery algorithm")
        ->check(CLI::IsMember({"main", "warmup"}))
        ->capture_default_str();
    cmd->add_option("--out", o.out, "Report path (stdout when omitted)");
    cmd->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--set", o.overrides, "Override a constant, NAME=VALUE (repeatable)");
}

sft::ExperimentConfig build_config(const Options& o) {
    sft::ExperimentConfig cfg;
    cfg.signal.p = o.p;
    cfg.signal.d = o.d;
    cfg.signal.k = o.k;
    cfg.signal.seed = o.seed;
    cfg.signal.sigma = o.sigma;
    if (o.snr) {
        const sft::Universe u(o.p, o.d);
        if (!(*o.snr > 0.0)) throw sft::ConfigError("--snr must be positive");
        if (static_cast<std::size_t>(o.k) >= u.n()) throw sft::ConfigError("--snr needs k < n");
        cfg.signal.sigma = sft::sigma_for_ratio(static_cast<std::int64_t>(u.n()), o.k, 1.0, *o.snr);
    }
    cfg.recovery = o.profile == "paper" ? sft::RecoveryConfig::paper() : sft::RecoveryConfig::desk();
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw sft::ConfigError("--set expects NAME=VALUE, got '" + kv + "'");
        const std::string name = kv.substr(0, eq);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
        } catch (const std::exception&) {
            throw sft::ConfigError("--set " + name + ": not a number");
        }
        cfg.recovery.set(name, value);
    }
    cfg.trials = o.trials;
    cfg.algorithm = sft::algorithm_from_string(o.algo);
    return cfg;
}

int run(const Options& o) {
    const sft::ExperimentConfig cfg = build_config(o);
    const sft::Report report = sft::run_experiment(cfg);
    const sft::ReportFormat fmt = sft::format_from_string(o.format);
    if (o.out.empty()) {
        std::cout << (fmt == sft::ReportFormat::json ? sft::report_to_json(report) : sft::report_to_csv(report));
    } else {
        sft::emit_report(report, fmt, o.out);
        const auto& a = report.aggregates;
        std::fprintf(stderr, "%zu/%zu trials within the noise floor, %zu samples per run -> %s\n", a.successes,
                     a.trials, a.sample_budget, o.out.c_str());
    }
    return 0;
}

int verify(std::uint64_t seed) {
    int failed = 0;
    for (const auto& c : sft::lemma_suite(seed)) {
        std::printf("%s  %-36s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        if (!c.passed) ++failed;
    }
    if (failed) {
        std::printf("%d check(s) failed\n", failed);
        return kExitThreshold;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse Fourier recovery: experiments and property checks"};
    app.require_subcommand(1);

    Options recover_opts;
    Options bench_opts;
    bench_opts.trials = 20;
    std::uint64_t verify_seed = 1;

    auto* recover = app.add_subcommand("recover", "Single recovery on a synthetic signal");
    add_run_flags(recover, recover_opts, false);
    auto* bench = app.add_subcommand("bench", "Seeded multi-trial experiment");
    add_run_flags(bench, bench_opts, true);
    auto* check = app.add_subcommand("verify", "Monte-Carlo property suite");
    check->add_option("--seed", verify_seed, "Master seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*recover) return run(recover_opts);
        if (*bench) return run(bench_opts);
        return verify(verify_seed);
    } catch (const sft::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const sft::AuditViolation& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitAudit;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

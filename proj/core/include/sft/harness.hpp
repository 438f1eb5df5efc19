#pragma once

#include "sft/recovery.hpp"
#include "sft/tensor_dft.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sft {

struct MagnitudeModel {
    enum class Kind { equal, geometric, list };
    Kind kind = Kind::equal;
    double scale = 1.0;            ///< magnitude of the first tone
    double ratio = 0.5;            ///< geometric decay per tone
    std::vector<double> values;    ///< explicit magnitudes, one per tone

    double magnitude(std::size_t i) const;
    friend bool operator==(const MagnitudeModel&, const MagnitudeModel&) = default;
};

/// A synthetic instance: k planted tones with uniform random phases at
/// distinct uniform random frequencies, plus complex Gaussian noise on every
/// frequency coordinate with E|noise|^2 = sigma^2.
struct SignalSpec {
    std::int64_t p = 16;
    std::int64_t d = 3;
    std::int64_t k = 8;
    MagnitudeModel magnitude{};
    double sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    friend bool operator==(const SignalSpec&, const SignalSpec&) = default;
};

struct GeneratedSignal {
    Signal x;
    Spectrum truth;
    std::vector<std::size_t> planted;  ///< sorted flat frequencies of the tones
};

GeneratedSignal gen_signal(const SignalSpec& spec);

/// sigma giving ||xhat||_inf / mu close to `ratio` for equal-magnitude tones:
/// the tail of n - k coordinates then has mu ~ sigma sqrt((n - k) / k).
double sigma_for_ratio(std::int64_t n, std::int64_t k, double scale, double ratio);

struct OracleResult {
    Spectrum xhat;
    SparseApprox top;        ///< k largest coordinates, ties by lower flat index
    double mu = 0.0;         ///< ||xhat_{-k}||_2 / sqrt(k)
    double mu_floor = 0.0;   ///< max(mu, mu_min * ||x||_2), what the algorithm is given
    std::uint64_t r_star = 2;  ///< next power of two >= ||xhat||_inf / mu_floor
};

/// Exact top-k, noise level and SNR bound from a full transform.
OracleResult oracle_top_k(const Signal& x, std::int64_t k, double mu_min = 1e-12);

enum class Algorithm { main, warmup };
std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct ExperimentConfig {
    SignalSpec signal{};
    RecoveryConfig recovery = RecoveryConfig::desk();
    std::size_t trials = 1;
    Algorithm algorithm = Algorithm::main;
};

struct Metrics {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double linf_error = 0.0;     ///< ||xhat - y||_inf
    double mu = 0.0;             ///< exact ||xhat_{-k}||_2 / sqrt(k)
    double noise_floor = 0.0;    ///< mu given to the algorithm (mu floored at mu_min ||x||_2)
    bool guarantee_ok = false;   ///< linf_error <= noise_floor
    double l2l2_after_topk = 0.0;  ///< ||xhat - top_k(y)||_2 / (sqrt(k) noise_floor)
    double support_precision = 0.0;
    double support_recall = 0.0;
    std::size_t support_size = 0;
    std::size_t samples_used = 0;
    std::size_t distinct_samples = 0;
    std::uint64_t r_star = 0;
    std::size_t iterations = 0;
    std::size_t shift_iterations = 0;
    int attempts_total = 0;
    int attempts_max = 0;
    bool shift_failed = false;
    double wall_ms = 0.0;
};

struct Aggregates {
    std::size_t trials = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    double mean_linf_error = 0.0;
    std::size_t shift_iterations = 0;
    double mean_attempts_per_iteration = 0.0;
    double median_attempts_per_iteration = 0.0;
    int max_attempts = 0;
    std::size_t sample_budget = 0;
    std::size_t shift_failures = 0;
};

struct Report {
    std::string schema_version = "1";
    ExperimentConfig config;
    std::vector<Metrics> trials;
    Aggregates aggregates;
};

/// Runs `trials` recoveries. Trial i uses seeds derived from (signal.seed, i),
/// so results do not depend on execution order. Throws ConfigError for
/// invalid configs or trials == 0, AuditViolation if a run reads outside its
/// declared bundle or the read count differs from B * R * H.
Report run_experiment(const ExperimentConfig& config);

Aggregates aggregate(const std::vector<Metrics>& trials);

enum class ReportFormat { json, csv };
ReportFormat format_from_string(const std::string& s);

std::string report_to_json(const Report& report);
Report report_from_json(const std::string& text);
/// Header plus one row per trial:
/// seed,linf_error,guarantee_ok,samples_used,wall_ms,attempts_total
std::string report_to_csv(const Report& report);

/// Writes the report; throws std::runtime_error naming the path on I/O failure.
void emit_report(const Report& report, ReportFormat format, const std::filesystem::path& path);

bool operator==(const Metrics& a, const Metrics& b);
bool operator==(const Report& a, const Report& b);

} // namespace sft

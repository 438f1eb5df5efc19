#pragma once

#include "sft/linf_reduce.hpp"
#include "sft/sampling.hpp"
#include "sft/tensor_dft.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sft {

/// Constants of the recovery algorithm.
struct RecoveryConfig {
    std::int64_t c_b = 8;     ///< bucket size B = c_b * k
    std::int64_t c_r = 4;     ///< repetitions R = c_r * ceil(log2 n)
    std::int64_t c_h = 3;     ///< inner rounds H = ceil(log2 k) + c_h, capped at log2 R*
    double alpha = 0.02;      ///< shift radius, in units of nu
    double beta = 0.08;       ///< grid side, in units of nu
    std::int64_t c_s = 26;    ///< heavy set size |S| = c_s * k (analysis only)
    double mu_min = 1e-12;    ///< noise floor relative to ||x||_2, applied by callers when mu = 0
    int max_shift_attempts_factor = 10;  ///< shift cap = factor * ceil(log2 n)
    ReduceOptions reduce{};

    /// Asymptotic constants: c_b = 1e6, c_r = 1e3, c_h = 20, alpha = 1e-3, beta = 0.04, c_s = 26.
    static RecoveryConfig paper();
    /// Small constants for desktop-sized runs.
    static RecoveryConfig desk();

    /// Throws ConfigError unless all counts are positive and
    /// alpha < beta < 0.1 with beta/2 >= alpha.
    void validate() const;

    /// Sets a constant by name (C_B, C_R, C_H, alpha, beta, C_S, mu_min,
    /// max_shift_attempts_factor). Throws ConfigError on unknown names.
    void set(const std::string& name, double value);

    friend bool operator==(const RecoveryConfig&, const RecoveryConfig&) = default;
};

/// Derived sizes for one run.
struct Schedule {
    std::size_t bucket = 0;       ///< B
    std::size_t repetitions = 0;  ///< R
    std::size_t rounds = 0;       ///< H
    std::size_t iterations = 0;   ///< L = log2 R* - H + 1
    std::uint64_t r_star = 0;     ///< rounded up to a power of two
    int log2_r_star = 0;

    std::size_t total_samples() const noexcept { return bucket * repetitions * rounds; }
    /// nu_l = 2^{-l} mu R*, l = 1..L.
    double nu(std::size_t l, double mu) const;
};

/// Smallest power of two >= value, and at least 2.
std::uint64_t round_up_pow2(double value);

/// Smallest H for which a random shift clears all boxes with probability at
/// least 1/2 when the support holds up to 2k entries: 2^{1-H} <= alpha / (8k).
std::size_t shift_round_floor(double alpha, std::int64_t k);

/// Schedule from the formula B = C_B k, R = C_R ceil(log2 n),
/// H = min(ceil(log2 k) + C_H, log2 R*), L = log2 R* - H + 1.
Schedule make_schedule(const RecoveryConfig& config, const Universe& u, std::int64_t k, double r_star);

/// Config with C_H raised, if needed, so that whenever L >= 2 the shift search
/// is in its union-bound regime (H >= shift_round_floor).
RecoveryConfig effective_config(const RecoveryConfig& config, const Universe& u, std::int64_t k, double r_star);

/// B * R * H for the given config, computed without adjustment.
std::size_t sample_budget(const RecoveryConfig& config, const Universe& u, std::int64_t k, double r_star);

/// Samples and sizes a run will use; lets callers declare the audit set
/// before the run. The bundle is a pure function of (config, k, R*, seed).
struct RecoveryPlan {
    RecoveryConfig config;  ///< effective config
    Schedule schedule;
    SampleBundle bundle;
};

RecoveryPlan plan_recovery(const RecoveryConfig& config, const Universe& u, std::int64_t k, double r_star,
                           std::uint64_t seed);
/// Warm-up variant: H fixed at 5, no C_H adjustment.
RecoveryPlan plan_recovery_by_projection(const RecoveryConfig& config, const Universe& u, std::int64_t k,
                                         double r_star, std::uint64_t seed);

struct IterationDiag {
    double nu = 0.0;            ///< radius entering the iteration
    double target = 0.0;        ///< 2^{1-H} nu
    std::size_t support = 0;    ///< |supp(y + z)|
    int shift_attempts = 0;     ///< 0 when no shift was drawn
    Complex shift{};
};

struct RecoveryResult {
    SparseApprox y;
    std::vector<IterationDiag> iterations;
    std::size_t samples_used = 0;
    Schedule schedule;
    RecoveryConfig config;
};

/// Sparse recovery by random shift and projection. Reads x only at the
/// bundle of plan_recovery(config, ., k, r_star, seed). Throws ConfigError
/// for mu <= 0, k < 1, R* < 2 or invalid constants, and ShiftSearchFailed
/// (tagged with the 1-based iteration) when the shift cap is hit.
RecoveryResult fourier_sparse_recovery(const AuditedSignal& x, std::int64_t k, double mu, double r_star,
                                       const RecoveryConfig& config, std::uint64_t seed);

/// Warm-up recovery by projection onto the grid of side 0.6 nu, no shift.
RecoveryResult fourier_sparse_recovery_by_projection(const AuditedSignal& x, std::int64_t k, double mu,
                                                     double r_star, const RecoveryConfig& config,
                                                     std::uint64_t seed);

} // namespace sft
